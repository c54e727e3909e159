// SPDX-License-Identifier: Apache-2.0
//
// dpbeam: hybrid beamforming codebooks for dual-polarized UPA backhaul links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Link bring-up protocol: exhaustive beam alignment over region codebooks,
// pilot-based estimation of the two polarization phase ratios, and the final
// polarization-matched codebooks built from the estimates.
//
// Throughout, an SNR passed as +infinity selects the noiseless limit.

#ifndef DPBEAM_PROTOCOL_HPP
#define DPBEAM_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dpbeam/channel.hpp"
#include "dpbeam/codebook.hpp"
#include "dpbeam/types.hpp"

namespace dpbeam {

// 4J-symbol pilot schedule. The four J-blocks satisfy the block-sum
// conditions: alpha sums to varsigma over blocks 1 and 3 and to zero over
// blocks 2 and 4, beta complementary; the receive gates select the vertical
// ports (kappa1) over the first half and the horizontal ports (kappa2) over
// the second half.
struct PilotSchedule {
    int j = 1;
    std::vector<cxd> alpha;    // length 4j
    std::vector<cxd> beta;     // length 4j
    std::vector<cxd> omega;    // length 4j
    std::vector<cxd> upsilon;  // length 4j
    cxd kappa1{1.0, 0.0};
    cxd kappa2{1.0, 0.0};
    double varsigma = 1.0;

    // Verify the block-sum and gating conditions to `tol`.
    bool check(double tol = 1e-9) const;
};

// Build the schedule from the first two columns of the J x J DFT matrix,
// repeated in order for alpha and in swapped order for beta (J = 1 uses the
// zero vector as the second column). Resulting varsigma = J.
PilotSchedule build_pilots(int j, cxd kappa1 = cxd(1.0, 0.0), cxd kappa2 = cxd(1.0, 0.0));

// --- single-codeword builders ------------------------------------------------

// Alignment-stage templates (no phase knowledge): transmit
// b R(phi)^H ([sqrt(1/(1+chi)) alpha; sqrt(chi/(1+chi)) beta] (x) c), receive
// b_rx [omega; upsilon] (x) c, each normalized to unit norm.
Vec alignment_tx_codeword(const Vec& c_single, double chi_known, double phi_known,
                          cxd alpha = cxd(1.0, 0.0), cxd beta = cxd(1.0, 0.0));
Vec alignment_rx_codeword(const Vec& c_single, cxd omega, cxd upsilon);

// Finalized codewords from the estimated ratios: transmit
// b R(phi)^H ([sqrt(1/(1+chi)) conj(ratio_tx); sqrt(chi/(1+chi))] (x) c),
// receive b_rx [conj(ratio_rx); 1] (x) c. Throws std::invalid_argument on
// non-finite ratios.
Vec finalize_tx_codeword(const Vec& c_single, cxd ratio_tx, double chi_known, double phi_known);
Vec finalize_rx_codeword(const Vec& c_single, cxd ratio_rx);

// --- codebook-level operations -----------------------------------------------

// Lift whole single-polarization codebooks to alignment codebooks. The
// receive gate defaults to (omega, upsilon) = (1, sqrt(chi_known)).
std::pair<Codebook, Codebook> alignment_codebooks(
    const Codebook& single_tx, const Codebook& single_rx, double chi_known, double phi_known,
    cxd alpha = cxd(1.0, 0.0), cxd beta = cxd(1.0, 0.0), cxd omega = cxd(1.0, 0.0),
    std::optional<cxd> upsilon = std::nullopt);

// Finalized codebooks from one ratio pair applied across all regions.
std::pair<Codebook, Codebook> finalize_codebooks(const Codebook& single_tx,
                                                 const Codebook& single_rx, cxd ratio_tx,
                                                 cxd ratio_rx, double chi_known,
                                                 double phi_known);

struct AlignmentResult {
    int p_tx = 1;
    int q_tx = 1;
    int p_rx = 1;
    int q_rx = 1;
    double metric = 0.0;  // received power of the winning pair
};

// Exhaustive sweep over all transmit x receive codeword pairs; each pair's
// received power gets an independent noise draw from a seed derived from
// `seed` and the pair index, so the winner does not depend on evaluation
// order. For a unit-norm combiner the projected transmit-power-normalized
// noise is standard complex Gaussian and is drawn directly. Ties resolve to
// the lowest pair index.
AlignmentResult beam_align(const ChannelRealization& ch, const Codebook& tx_align,
                           const Codebook& rx_align, double snr, std::uint64_t seed);

struct RatioEstimate {
    cxd ratio_tx;  // estimate of e^{j(zeta_vv - zeta_vh)}
    cxd ratio_rx;  // estimate of xi_v / xi_h
};

// Run the 4J pilot symbols through the channel with the aligned
// single-polarization codewords and form the two ratio estimates from the
// block sums Y1..Y4: ratio_tx = chi*Y1/Y2 and the receive-side quotient with
// the 1/kappa scalings. Throws estimation_error when |Y2| or the receive-side
// denominator falls below 1e-12 (possible under noise or chi -> 0).
RatioEstimate estimate_ratios(const ChannelRealization& ch, const Vec& c_tx_single,
                              const Vec& c_rx_single, const PilotSchedule& pilots, double snr,
                              double chi_known, double phi_known, std::uint64_t seed);

// Spectral efficiency log2(1 + snr*|c_rx^H H c_tx|^2) of a codeword pair.
double pair_rate(const ChannelRealization& ch, const Vec& c_rx, const Vec& c_tx, double snr);

}  // namespace dpbeam

#endif  // DPBEAM_PROTOCOL_HPP

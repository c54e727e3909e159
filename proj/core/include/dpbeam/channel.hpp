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
// Rician dual-polarized MIMO channel synthesis: one deterministic-magnitude
// line-of-sight path plus N scattered paths, each an outer product of paired
// steering vectors wrapped in a 2x2 polarization leakage matrix and the
// transmit-side rotation.

#ifndef DPBEAM_CHANNEL_HPP
#define DPBEAM_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "dpbeam/array.hpp"
#include "dpbeam/polarization.hpp"
#include "dpbeam/rng.hpp"
#include "dpbeam/types.hpp"

namespace dpbeam {

struct ChannelConfig {
    double k_db = 13.2;   // Rician factor (dB); converted to linear once, here
    int n_nlos = 3;       // scattered path count; 0 selects the pure-LOS limit
    double chi_min = 0.25;
    double chi_max = 0.35;
    double phi_min = -0.08726646259971647;  // -pi/36
    double phi_max = 0.08726646259971647;   //  pi/36
    // Angular coverage the path directions are drawn from (radians).
    double az_min = -1.5707963267948966;  // -pi/2
    double az_max = 1.5707963267948966;
    double el_min = -0.7853981633974483;  // -pi/4
    double el_max = 0.7853981633974483;

    double k_linear() const;
    double chi_mean() const { return 0.5 * (chi_min + chi_max); }
    double phi_mean() const { return 0.5 * (phi_min + phi_max); }
    void validate() const;  // throws config_error
};

// One propagation path: complex gain, departure/arrival directions, and its
// own draw of the four polarization phases.
struct PathComponent {
    cxd gain;
    double aod_az = 0.0;
    double aod_el = 0.0;
    double aoa_az = 0.0;
    double aoa_el = 0.0;
    double zeta_vv = 0.0;
    double zeta_vh = 0.0;
    double zeta_hv = 0.0;
    double zeta_hh = 0.0;

    PolarizationState pol(double chi, double phi) const {
        return PolarizationState(chi, phi, zeta_vv, zeta_vh, zeta_hv, zeta_hh);
    }
};

struct ChannelRealization {
    Mat h;                            // port_count(rx) x port_count(tx)
    PolarizationState pol;            // chi, phi, and the LOS path's phases
    std::vector<PathComponent> paths; // paths[0] is the LOS path
    double k_linear = 0.0;
    ArrayGeometry tx_geom;
    ArrayGeometry rx_geom;
};

// Unscaled dual-polarized path matrix:
// gain * {(2x2 leakage magnitudes .* phases) (x) a_rx a_tx^H} R(phi).
Mat path_component(const PolarizationState& pol, cxd gain, double aod_az, double aod_el,
                   double aoa_az, double aoa_el, const ArrayGeometry& tx_geom,
                   const ArrayGeometry& rx_geom);

// Transmit-side LOS factor: the upper polarization-row block
// h0 * {([rho_vv rho_vh] as magnitudes .* phases) (x) d_rx d_tx^H} R(phi),
// a (panel_rx) x (ports_tx) matrix. Used by the gain-decomposition identity.
Mat tx_side_los(const PolarizationState& pol, cxd h0, double aod_az, double aod_el,
                double aoa_az, double aoa_el, const ArrayGeometry& tx_geom,
                const ArrayGeometry& rx_geom);

// Draw one channel realization. All randomness comes from `seed`; the same
// seed reproduces the realization bit-for-bit. Draw order (documented
// contract): chi, phi, then per path (LOS first): four zeta phases, AoD
// azimuth/elevation, AoA azimuth/elevation, then the path gain (LOS: uniform
// unit phase; scattered: standard complex Gaussian).
ChannelRealization sample_channel(const ChannelConfig& cfg, const ArrayGeometry& tx_geom,
                                  const ArrayGeometry& rx_geom, std::uint64_t seed);

}  // namespace dpbeam

#endif  // DPBEAM_CHANNEL_HPP

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
// Region codebook design. Two per-region single-polarization criteria:
//  * SE  — pick, from a small candidate family, the beamformer whose section
//          pattern is closest (squared error) to the flat ideal pattern;
//  * MIP — maximize the mean in-region projection, i.e. the dominant
//          eigenvector of the region dictionary Gram matrix.
// Single-polarization beamformers are lifted to dual-polarized codewords by
// matched polarization weighting on the transmit and receive sides.

#ifndef DPBEAM_CODEBOOK_HPP
#define DPBEAM_CODEBOOK_HPP

#include <optional>
#include <string>
#include <vector>

#include "dpbeam/array.hpp"
#include "dpbeam/hybrid.hpp"
#include "dpbeam/polarization.hpp"
#include "dpbeam/types.hpp"

namespace dpbeam {

enum class Criterion { SE, MIP, Baseline, Alignment };
enum class LinkEnd { Tx, Rx };
enum class PolLayout { Single, Dual };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

struct Codeword {
    Vec w;  // unit norm
    Criterion criterion = Criterion::SE;
    LinkEnd end = LinkEnd::Tx;
    PolLayout pol = PolLayout::Single;
    int p = 1;  // region column, 1-based
    int q = 1;  // region row, 1-based
    // Hybrid factorization of `w` when one was computed (analog * digital).
    std::optional<HybridBeamformer> hybrid;

    void validate() const;  // unit norm to 1e-12, finite entries
};

struct Codebook {
    std::vector<Codeword> words;  // ordered region-major: (p-1)*q_v + (q-1)
    int q_h = 0;
    int q_v = 0;

    const Codeword& at(int p, int q) const;
    Codeword& at(int p, int q);
    int size() const { return static_cast<int>(words.size()); }
};

// Flat ideal section pattern of region (p, q): exactly l_h*l_v entries equal
// to gain = q_h*q_v*sqrt(2)/(m_h*m_v) at the sections owned by the region,
// zero elsewhere; indexed like the dictionary columns.
struct IdealPatternVector {
    int p = 1;
    int q = 1;
    double gain = 0.0;
    RVec g;
};

IdealPatternVector ideal_pattern(const RegionPartition& part, const ArrayGeometry& geom, int p,
                                 int q);

// Section-domain power pattern of a dual-polarized codeword: for the transmit
// end |b [rho_vv rho_vh] (x) D^H R(phi) c|^2, for the receive end
// |b_rx [xi_v xi_h] (x) D^H c|^2, evaluated at every dictionary column.
RVec pattern_vector(const Codeword& cw, const PolarizationState& pol, const DictionarySet& dict);

// Same pattern for a single-polarization beamformer: |D^H c|^2. Both exact
// lifts reproduce this vector identically (pattern invariance).
RVec pattern_single(const Vec& c_single, const DictionarySet& dict);

// Fold a dual-polarized codeword into its single-panel equivalent under the
// polarization row of the given link end: the pattern of the codeword equals
// |D^H fold|^2. Exposed because several identities are phrased through it.
Vec fold_dual(const Vec& c_dual, const PolarizationState& pol, LinkEnd end);

// SE candidate combination vectors. The default family uses, per axis, the
// B linear phase ramps q_i = exp(j*(i-1)*(-pi + 2*pi*l/B)), l = 1..B. The
// family is a plain data holder, so alternative generators can be plugged in.
struct SeCandidateSet {
    std::vector<Vec> q_h;  // length-l_h combination vectors
    std::vector<Vec> q_v;  // length-l_v combination vectors

    static SeCandidateSet phase_ramps(int b_levels, int l_h, int l_v);
};

// Single-polarization SE candidate for region (p, q):
// normalize( (D_h,p q_lh) (x) (D_v,q q_lv) ). Throws candidate_error if the
// combination annihilates a dictionary block.
Vec se_single_candidate(const Vec& q_lh, const Vec& q_lv, const DictionarySet& dict, int p, int q);

// Single-polarization MIP beamformer for region (p, q): dominant eigenvector
// of D_pq D_pq^H via the deterministic power iteration.
Vec mip_single(const DictionarySet& dict, int p, int q);

// Matched dual-polarization lifts (unit norm):
//   transmit: b R(phi)^H ([conj(rho_vv); conj(rho_vh)] (x) c)
//   receive:  b_rx ([conj(xi_v); conj(xi_h)] (x) c)
Vec lift_tx(const Vec& c_single, const PolarizationState& pol);
Vec lift_rx(const Vec& c_single, const PolarizationState& pol);

struct SeSelection {
    Codeword chosen;      // dual-polarized; hybrid-factorized when requested
    int index_h = 0;      // chosen candidate index per axis
    int index_v = 0;
    double squared_error = 0.0;
};

// Exhaustive SE selection over the candidate family for region (p, q) of
// `end`. When `omp` is given, each candidate is hybrid-decomposed (and phase
// quantized) before its pattern is scored, so selection sees the pattern that
// will actually be radiated. Ties resolve to the lowest (index_h, index_v).
SeSelection se_select(const SeCandidateSet& candidates, const DictionarySet& dict,
                      const PolarizationState& pol, int p, int q, LinkEnd end = LinkEnd::Tx,
                      const std::optional<OmpSettings>& omp = std::nullopt);

}  // namespace dpbeam

#endif  // DPBEAM_CODEBOOK_HPP

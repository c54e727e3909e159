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
// Greedy hybrid decomposition of a target beamformer into a constant-modulus
// analog matrix and a digital combining vector, with optional phase-grid
// quantization of the analog weights.

#ifndef DPBEAM_HYBRID_HPP
#define DPBEAM_HYBRID_HPP

#include <optional>

#include "dpbeam/types.hpp"

namespace dpbeam {

struct OmpSettings {
    int n_rf = 4;                        // analog columns (RF chains)
    std::optional<int> phase_bits = {};  // phase grid resolution; empty = continuous
};

struct HybridBeamformer {
    Mat analog;   // M x n_rf, every entry of magnitude 1/sqrt(M)
    Vec digital;  // n_rf, scaled so ||analog * digital|| = 1
    std::optional<int> phase_bits;

    Vec product() const { return analog * digital; }
    void validate() const;  // modulus, product norm, grid membership
};

// Orthogonal matching pursuit against the residual phase profile:
// start with r = target; each step appends the constant-modulus column
// (1/sqrt(M)) e^{j arg(r)} (zero entries contribute phase 0), refits the
// digital vector by least squares on the accumulated columns, renormalizes
// the product to unit norm, and updates the residual. If `phase_bits` is set,
// analog phases are snapped to the 2^bits grid after the loop and the digital
// vector is refit once more. Gram solves use Cholesky with a 1e-12 ridge
// fallback.
HybridBeamformer omp_decompose(const Vec& target, int n_rf,
                               std::optional<int> phase_bits = std::nullopt);

}  // namespace dpbeam

#endif  // DPBEAM_HYBRID_HPP

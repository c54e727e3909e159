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

#ifndef DPBEAM_EIG_HPP
#define DPBEAM_EIG_HPP

#include "dpbeam/types.hpp"

namespace dpbeam {

struct DominantEig {
    Vec vector;      // unit norm, phase-canonical (largest-|.| entry real >= 0)
    double value;    // Rayleigh quotient at convergence
    int iterations;
    double residual; // ||A v - value * v|| at convergence
};

// Dominant eigenpair of a Hermitian positive semidefinite matrix by power
// iteration. Deterministic contract: all-ones start vector, convergence when
// successive Rayleigh quotients differ by less than `tol`, hard cap of
// `max_iters` iterations (throws eigen_error with the last residual on
// failure). The returned vector's global phase is canonicalized so the
// largest-magnitude entry (first such index on ties) is real and positive.
DominantEig dominant_eigenvector(const Mat& a, double tol = 1e-12, int max_iters = 10000);

}  // namespace dpbeam

#endif  // DPBEAM_EIG_HPP

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

#include "dpbeam/eig.hpp"

#include <cmath>

namespace dpbeam {

namespace {

// Rotate the global phase so the largest-magnitude entry is real positive;
// ties resolved to the first such index.
void canonicalize_phase(Vec& v) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag > 0.0) {
        const cxd rot = std::conj(v(best)) / best_mag;
        v *= rot;
        v(best) = cxd(std::abs(v(best)), 0.0);  // clear residual imaginary dust
    }
}

}  // namespace

DominantEig dominant_eigenvector(const Mat& a, double tol, int max_iters) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("dominant_eigenvector requires a square non-empty matrix");
    }
    const Eigen::Index n = a.rows();

    Vec v = Vec::Constant(n, cxd(1.0, 0.0) / std::sqrt(static_cast<double>(n)));
    double lambda = std::real(v.dot(a * v));  // v.dot(x) = v^H x

    int it = 0;
    double residual = (a * v - lambda * v).norm();
    for (; it < max_iters; ++it) {
        Vec w = a * v;
        const double wn = w.norm();
        if (wn == 0.0) {
            // Start vector lies in the null space; the zero matrix is the only
            // PSD case reaching here from the all-ones start.
            lambda = 0.0;
            residual = 0.0;
            break;
        }
        v = w / wn;
        const double next = std::real(v.dot(a * v));
        residual = (a * v - next * v).norm();
        const bool done = std::abs(next - lambda) < tol;
        lambda = next;
        if (done) break;
    }
    if (it >= max_iters) {
        throw eigen_error("power iteration did not converge within " + std::to_string(max_iters) +
                              " iterations (last residual " + std::to_string(residual) + ")",
                          residual);
    }

    canonicalize_phase(v);
    return DominantEig{std::move(v), lambda, it + 1, residual};
}

}  // namespace dpbeam

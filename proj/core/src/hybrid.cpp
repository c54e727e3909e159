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

#include "dpbeam/hybrid.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>

namespace dpbeam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRidge = 1e-12;

// Least-squares coefficients u = argmin ||F u - t||: Cholesky on the Gram
// matrix, falling back to a ridge-regularized solve if the factorization
// reports a non-positive pivot.
Vec gram_solve(const Mat& f, const Vec& t) {
    const Mat gram = f.adjoint() * f;
    const Vec rhs = f.adjoint() * t;
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() == Eigen::Success) {
        return llt.solve(rhs);
    }
    Mat ridged = gram;
    ridged.diagonal().array() += kRidge;
    return Eigen::LDLT<Mat>(ridged).solve(rhs);
}

// Residual phase as a constant-modulus column; exact zeros contribute phase 0.
Vec phase_column(const Vec& r, double scale) {
    Vec f(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double ph = (r(i) == cxd(0.0, 0.0)) ? 0.0 : std::arg(r(i));
        f(i) = std::polar(scale, ph);
    }
    return f;
}

double snap_phase(double ph, int bits) {
    const double step = kTwoPi / std::ldexp(1.0, bits);  // 2*pi / 2^bits
    double snapped = std::round(ph / step) * step;
    // Keep the representative in [0, 2*pi).
    snapped = std::fmod(snapped, kTwoPi);
    if (snapped < 0.0) snapped += kTwoPi;
    return snapped;
}

}  // namespace

void HybridBeamformer::validate() const {
    if (analog.rows() == 0 || analog.cols() == 0 || digital.size() != analog.cols()) {
        throw std::invalid_argument("hybrid beamformer has inconsistent dimensions");
    }
    const double want = 1.0 / std::sqrt(static_cast<double>(analog.rows()));
    for (Eigen::Index i = 0; i < analog.rows(); ++i) {
        for (Eigen::Index n = 0; n < analog.cols(); ++n) {
            if (std::abs(std::abs(analog(i, n)) - want) > 1e-12) {
                throw std::invalid_argument("analog weight magnitude off the constant-modulus rail");
            }
            if (phase_bits) {
                const double ph = std::arg(analog(i, n));
                const double snapped = snap_phase(ph, *phase_bits);
                double diff = std::abs(std::remainder(ph - snapped, kTwoPi));
                if (diff > 1e-9) {
                    throw std::invalid_argument("analog phase off the quantization grid");
                }
            }
        }
    }
    if (std::abs(product().norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("hybrid product is not unit norm");
    }
}

HybridBeamformer omp_decompose(const Vec& target, int n_rf, std::optional<int> phase_bits) {
    const Eigen::Index m = target.size();
    if (m == 0) throw std::invalid_argument("omp_decompose: empty target");
    if (n_rf < 1) throw std::invalid_argument("omp_decompose: n_rf must be >= 1");
    if (phase_bits && (*phase_bits < 1 || *phase_bits > 62)) {
        throw std::invalid_argument("omp_decompose: phase_bits out of range");
    }
    if (target.norm() == 0.0) throw std::invalid_argument("omp_decompose: zero target");

    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    Mat f(m, n_rf);
    Vec v;
    Vec r = target;
    for (int n = 0; n < n_rf; ++n) {
        f.col(n) = phase_column(r, scale);
        const auto fn = f.leftCols(n + 1);
        const Vec u = gram_solve(fn, target);
        const Vec fu = fn * u;
        const double norm = fu.norm();
        if (norm == 0.0) throw std::invalid_argument("omp_decompose: degenerate projection");
        v = u / norm;
        r = target - fn * v;
    }

    HybridBeamformer hb;
    hb.analog = std::move(f);
    hb.phase_bits = phase_bits;
    if (phase_bits) {
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index n = 0; n < n_rf; ++n) {
                hb.analog(i, n) = std::polar(scale, snap_phase(std::arg(hb.analog(i, n)), *phase_bits));
            }
        }
        const Vec u = gram_solve(hb.analog, target);
        const Vec fu = hb.analog * u;
        const double norm = fu.norm();
        if (norm == 0.0) throw std::invalid_argument("omp_decompose: degenerate quantized projection");
        v = u / norm;
    }
    hb.digital = std::move(v);
    return hb;
}

}  // namespace dpbeam

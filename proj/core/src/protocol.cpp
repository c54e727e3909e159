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

#include "dpbeam/protocol.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "dpbeam/rng.hpp"

namespace dpbeam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(cxd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Stack [top_gain; bottom_gain] (x) c and normalize.
Vec stack_dual(const Vec& c, cxd top, cxd bottom) {
    const Eigen::Index m = c.size();
    Vec out(2 * m);
    out.head(m) = top * c;
    out.tail(m) = bottom * c;
    const double n = out.norm();
    if (n == 0.0) throw std::invalid_argument("dual-polarization stack is the zero vector");
    return out / n;
}

Codebook map_codebook(const Codebook& single, Criterion crit, LinkEnd end,
                      const std::function<Vec(const Vec&)>& mapper) {
    Codebook out;
    out.q_h = single.q_h;
    out.q_v = single.q_v;
    out.words.reserve(single.words.size());
    for (const Codeword& s : single.words) {
        Codeword w;
        w.w = mapper(s.w);
        w.criterion = crit;
        w.end = end;
        w.pol = PolLayout::Dual;
        w.p = s.p;
        w.q = s.q;
        out.words.push_back(std::move(w));
    }
    return out;
}

}  // namespace

bool PilotSchedule::check(double tol) const {
    const size_t n = static_cast<size_t>(4 * j);
    if (j < 1 || alpha.size() != n || beta.size() != n || omega.size() != n ||
        upsilon.size() != n) {
        return false;
    }
    auto block_sum = [&](const std::vector<cxd>& v, int block) {
        cxd s(0.0, 0.0);
        for (int i = block * j; i < (block + 1) * j; ++i) s += v[static_cast<size_t>(i)];
        return s;
    };
    const cxd vs(varsigma, 0.0);
    if (std::abs(block_sum(alpha, 0) - vs) > tol) return false;
    if (std::abs(block_sum(alpha, 1)) > tol) return false;
    if (std::abs(block_sum(alpha, 2) - vs) > tol) return false;
    if (std::abs(block_sum(alpha, 3)) > tol) return false;
    if (std::abs(block_sum(beta, 0)) > tol) return false;
    if (std::abs(block_sum(beta, 1) - vs) > tol) return false;
    if (std::abs(block_sum(beta, 2)) > tol) return false;
    if (std::abs(block_sum(beta, 3) - vs) > tol) return false;
    for (size_t i = 0; i < n; ++i) {
        const bool first_half = i < static_cast<size_t>(2 * j);
        const cxd want_omega = first_half ? kappa1 : cxd(0.0, 0.0);
        const cxd want_upsilon = first_half ? cxd(0.0, 0.0) : kappa2;
        if (std::abs(omega[i] - want_omega) > tol) return false;
        if (std::abs(upsilon[i] - want_upsilon) > tol) return false;
    }
    return true;
}

PilotSchedule build_pilots(int j, cxd kappa1, cxd kappa2) {
    if (j < 1) throw config_error("pilot block length must be >= 1");
    if (std::abs(kappa1) == 0.0 || std::abs(kappa2) == 0.0) {
        throw config_error("pilot receive gates kappa1/kappa2 must be nonzero");
    }
    PilotSchedule s;
    s.j = j;
    s.kappa1 = kappa1;
    s.kappa2 = kappa2;
    s.varsigma = static_cast<double>(j);

    // First two columns of the J x J DFT matrix; J = 1 has no second column,
    // the zero vector keeps the off-blocks silent.
    std::vector<cxd> col1(static_cast<size_t>(j)), col2(static_cast<size_t>(j));
    for (int row = 0; row < j; ++row) {
        col1[static_cast<size_t>(row)] = cxd(1.0, 0.0);
        col2[static_cast<size_t>(row)] =
            (j == 1) ? cxd(0.0, 0.0) : std::polar(1.0, -kTwoPi * row / j);
    }

    const size_t n = static_cast<size_t>(4 * j);
    s.alpha.reserve(n);
    s.beta.reserve(n);
    s.omega.assign(n, cxd(0.0, 0.0));
    s.upsilon.assign(n, cxd(0.0, 0.0));
    auto append = [&](std::vector<cxd>& dst, const std::vector<cxd>& col) {
        dst.insert(dst.end(), col.begin(), col.end());
    };
    append(s.alpha, col1);  // block 1
    append(s.alpha, col2);  // block 2
    append(s.alpha, col1);  // block 3
    append(s.alpha, col2);  // block 4
    append(s.beta, col2);
    append(s.beta, col1);
    append(s.beta, col2);
    append(s.beta, col1);
    for (size_t i = 0; i < n; ++i) {
        if (i < static_cast<size_t>(2 * j)) {
            s.omega[i] = kappa1;
        } else {
            s.upsilon[i] = kappa2;
        }
    }
    return s;
}

Vec alignment_tx_codeword(const Vec& c_single, double chi_known, double phi_known, cxd alpha,
                          cxd beta) {
    const double co = std::sqrt(1.0 / (1.0 + chi_known));
    const double cross = std::sqrt(chi_known / (1.0 + chi_known));
    const Vec stacked = stack_dual(c_single, co * alpha, cross * beta);
    const Eigen::Index m = c_single.size();
    return rotation_matrix(phi_known, static_cast<int>(m)).transpose().cast<cxd>() * stacked;
}

Vec alignment_rx_codeword(const Vec& c_single, cxd omega, cxd upsilon) {
    return stack_dual(c_single, omega, upsilon);
}

Vec finalize_tx_codeword(const Vec& c_single, cxd ratio_tx, double chi_known, double phi_known) {
    if (!finite(ratio_tx)) {
        throw std::invalid_argument("finalize: transmit phase ratio is not finite");
    }
    return alignment_tx_codeword(c_single, chi_known, phi_known, std::conj(ratio_tx),
                                 cxd(1.0, 0.0));
}

Vec finalize_rx_codeword(const Vec& c_single, cxd ratio_rx) {
    if (!finite(ratio_rx)) {
        throw std::invalid_argument("finalize: receive ratio is not finite");
    }
    return stack_dual(c_single, std::conj(ratio_rx), cxd(1.0, 0.0));
}

std::pair<Codebook, Codebook> alignment_codebooks(const Codebook& single_tx,
                                                  const Codebook& single_rx, double chi_known,
                                                  double phi_known, cxd alpha, cxd beta,
                                                  cxd omega, std::optional<cxd> upsilon) {
    const cxd ups = upsilon.value_or(cxd(std::sqrt(chi_known), 0.0));
    Codebook tx = map_codebook(single_tx, Criterion::Alignment, LinkEnd::Tx, [&](const Vec& c) {
        return alignment_tx_codeword(c, chi_known, phi_known, alpha, beta);
    });
    Codebook rx = map_codebook(single_rx, Criterion::Alignment, LinkEnd::Rx, [&](const Vec& c) {
        return alignment_rx_codeword(c, omega, ups);
    });
    return {std::move(tx), std::move(rx)};
}

std::pair<Codebook, Codebook> finalize_codebooks(const Codebook& single_tx,
                                                 const Codebook& single_rx, cxd ratio_tx,
                                                 cxd ratio_rx, double chi_known,
                                                 double phi_known) {
    if (!finite(ratio_tx) || !finite(ratio_rx)) {
        throw std::invalid_argument("finalize: ratios must be finite");
    }
    Codebook tx = map_codebook(single_tx, single_tx.words.empty() ? Criterion::SE
                                                                  : single_tx.words[0].criterion,
                               LinkEnd::Tx, [&](const Vec& c) {
                                   return finalize_tx_codeword(c, ratio_tx, chi_known, phi_known);
                               });
    Codebook rx = map_codebook(single_rx, single_rx.words.empty() ? Criterion::SE
                                                                  : single_rx.words[0].criterion,
                               LinkEnd::Rx,
                               [&](const Vec& c) { return finalize_rx_codeword(c, ratio_rx); });
    return {std::move(tx), std::move(rx)};
}

AlignmentResult beam_align(const ChannelRealization& ch, const Codebook& tx_align,
                           const Codebook& rx_align, double snr, std::uint64_t seed) {
    if (tx_align.words.empty() || rx_align.words.empty()) {
        throw std::invalid_argument("beam_align: empty codebook");
    }
    const Eigen::Index m_tx = ch.h.cols();
    const Eigen::Index m_rx = ch.h.rows();

    Mat wtx(m_tx, tx_align.size());
    for (int i = 0; i < tx_align.size(); ++i) {
        if (tx_align.words[static_cast<size_t>(i)].w.size() != m_tx) {
            throw std::invalid_argument("beam_align: transmit codeword dimension mismatch");
        }
        wtx.col(i) = tx_align.words[static_cast<size_t>(i)].w;
    }
    Mat wrx(m_rx, rx_align.size());
    for (int i = 0; i < rx_align.size(); ++i) {
        if (rx_align.words[static_cast<size_t>(i)].w.size() != m_rx) {
            throw std::invalid_argument("beam_align: receive codeword dimension mismatch");
        }
        wrx.col(i) = rx_align.words[static_cast<size_t>(i)].w;
    }

    const Mat t = wrx.adjoint() * ch.h * wtx;  // n_rx x n_tx pair responses

    const bool noiseless = !std::isfinite(snr);
    const double amp = noiseless ? 1.0 : std::sqrt(snr);

    AlignmentResult best;
    double best_metric = -1.0;
    for (int it = 0; it < tx_align.size(); ++it) {
        for (int ir = 0; ir < rx_align.size(); ++ir) {
            const std::uint64_t pair_index =
                static_cast<std::uint64_t>(it) * static_cast<std::uint64_t>(rx_align.size()) +
                static_cast<std::uint64_t>(ir);
            cxd y = amp * t(ir, it);
            if (!noiseless) {
                Rng rng = make_rng(mix_seed(seed, pair_index));
                y += complex_normal(rng);
            }
            const double metric = std::norm(y);
            if (metric > best_metric) {
                best_metric = metric;
                const Codeword& wt = tx_align.words[static_cast<size_t>(it)];
                const Codeword& wr = rx_align.words[static_cast<size_t>(ir)];
                best = AlignmentResult{wt.p, wt.q, wr.p, wr.q, metric};
            }
        }
    }
    return best;
}

RatioEstimate estimate_ratios(const ChannelRealization& ch, const Vec& c_tx_single,
                              const Vec& c_rx_single, const PilotSchedule& pilots, double snr,
                              double chi_known, double phi_known, std::uint64_t seed) {
    if (!pilots.check()) throw config_error("pilot schedule fails its block-sum conditions");
    const Eigen::Index m_tx_half = ch.h.cols() / 2;
    const Eigen::Index m_rx_half = ch.h.rows() / 2;
    if (c_tx_single.size() != m_tx_half || c_rx_single.size() != m_rx_half) {
        throw std::invalid_argument("estimate_ratios: codeword dimensions do not match channel");
    }

    // Pilot codewords share one constant prefactor (taken as 1) instead of
    // per-symbol normalization: a symbol-dependent scale would weight the
    // four block sums differently and break both ratio identities.
    const double co = std::sqrt(1.0 / (1.0 + chi_known));
    const double cross = std::sqrt(chi_known / (1.0 + chi_known));
    const Mat rot =
        rotation_matrix(phi_known, static_cast<int>(m_tx_half)).transpose().cast<cxd>();

    // Transmit basis: R^H [co*c; 0] and R^H [0; cross*c]; the symbol codeword
    // is alpha_j * basis_v + beta_j * basis_h.
    Vec basis_v = Vec::Zero(2 * m_tx_half);
    basis_v.head(m_tx_half) = co * c_tx_single;
    basis_v = rot * basis_v;
    Vec basis_h = Vec::Zero(2 * m_tx_half);
    basis_h.tail(m_tx_half) = cross * c_tx_single;
    basis_h = rot * basis_h;

    // Receive rows: c_rx gated on the vertical or horizontal port block.
    // g = H_block^H c_rx, so g.dot(x) = c_rx^H H_block x.
    const Vec g_v = ch.h.topRows(m_rx_half).adjoint() * c_rx_single;
    const Vec g_h = ch.h.bottomRows(m_rx_half).adjoint() * c_rx_single;

    const cxd s_vv = g_v.dot(basis_v);  // vertical gate, alpha path
    const cxd s_vb = g_v.dot(basis_h);  // vertical gate, beta path
    const cxd s_hv = g_h.dot(basis_v);
    const cxd s_hb = g_h.dot(basis_h);

    const bool noiseless = !std::isfinite(snr);
    const double amp = noiseless ? 1.0 : std::sqrt(snr);
    Rng rng = make_rng(mix_seed(seed, 0x70696c6f74ULL));  // pilot noise stream

    const int n = 4 * pilots.j;
    cxd y_blocks[4] = {cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)};
    for (int i = 0; i < n; ++i) {
        const size_t si = static_cast<size_t>(i);
        const cxd a = pilots.alpha[si];
        const cxd b = pilots.beta[si];
        const cxd w = pilots.omega[si];
        const cxd u = pilots.upsilon[si];
        cxd y = amp * (std::conj(w) * (a * s_vv + b * s_vb) +
                       std::conj(u) * (a * s_hv + b * s_hb));
        if (!noiseless) {
            // Combiner norm for this symbol: ||[w; u] (x) c_rx|| with unit c_rx.
            const double combiner_norm = std::sqrt(std::norm(w) + std::norm(u));
            y += combiner_norm * complex_normal(rng);
        }
        y_blocks[i / pilots.j] += y;
    }

    const cxd y1 = y_blocks[0], y2 = y_blocks[1], y3 = y_blocks[2], y4 = y_blocks[3];
    if (std::abs(y2) < 1e-12) {
        throw estimation_error("pilot block sum Y2 collapsed; cannot form transmit ratio");
    }
    if (chi_known <= 0.0) {
        throw estimation_error("cross-polarization leakage must be positive to form ratios");
    }

    RatioEstimate est;
    est.ratio_tx = chi_known * y1 / y2;

    const cxd z1 = y1 / pilots.kappa1;
    const cxd z2 = y2 / pilots.kappa1;
    const cxd z3 = y3 / pilots.kappa2;
    const cxd z4 = y4 / pilots.kappa2;
    const double num = std::norm(z1) + std::norm(z2) / chi_known;
    const cxd den = z1 * std::conj(z3) + (z2 * std::conj(z4)) / chi_known;
    if (std::abs(den) < 1e-12) {
        throw estimation_error("receive-ratio denominator collapsed");
    }
    est.ratio_rx = cxd(num, 0.0) / den;
    return est;
}

double pair_rate(const ChannelRealization& ch, const Vec& c_rx, const Vec& c_tx, double snr) {
    const cxd g = c_rx.dot(ch.h * c_tx);  // c_rx^H H c_tx
    return std::log2(1.0 + snr * std::norm(g));
}

}  // namespace dpbeam

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

#include "dpbeam/codebook.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>

#include "dpbeam/eig.hpp"

namespace dpbeam {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::SE: return "se";
        case Criterion::MIP: return "mip";
        case Criterion::Baseline: return "dft-baseline";
        case Criterion::Alignment: return "align";
    }
    return "unknown";
}

Criterion criterion_from_string(const std::string& s) {
    if (s == "se") return Criterion::SE;
    if (s == "mip") return Criterion::MIP;
    if (s == "baseline" || s == "dft-baseline") return Criterion::Baseline;
    if (s == "align" || s == "alignment") return Criterion::Alignment;
    throw config_error("unknown criterion '" + s + "' (expected se, mip, or baseline)");
}

void Codeword::validate() const {
    if (w.size() == 0) throw std::invalid_argument("empty codeword");
    if (!w.allFinite()) throw std::invalid_argument("codeword has non-finite entries");
    if (std::abs(w.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("codeword is not unit norm");
    }
}

const Codeword& Codebook::at(int p, int q) const {
    if (p < 1 || p > q_h || q < 1 || q > q_v) {
        throw std::out_of_range("codebook region index out of range");
    }
    return words.at(static_cast<size_t>((p - 1) * q_v + (q - 1)));
}

Codeword& Codebook::at(int p, int q) {
    return const_cast<Codeword&>(static_cast<const Codebook&>(*this).at(p, q));
}

IdealPatternVector ideal_pattern(const RegionPartition& part, const ArrayGeometry& geom, int p,
                                 int q) {
    IdealPatternVector ideal;
    ideal.p = p;
    ideal.q = q;
    ideal.gain = part.region_count() * kSqrt2 / geom.panel_size();
    if (ideal.gain >= 1.0) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true)) {
            std::cerr << "warning: flat ideal gain " << ideal.gain
                      << " >= 1; panel too small for this region count\n";
        }
    }
    ideal.g = RVec::Zero(part.section_count());
    for (int idx : part.region_section_indices(p, q)) {
        ideal.g(idx) = ideal.gain;
    }
    return ideal;
}

Vec fold_dual(const Vec& c_dual, const PolarizationState& pol, LinkEnd end) {
    if (c_dual.size() % 2 != 0) {
        throw std::invalid_argument("dual-polarized vector must have even length");
    }
    const Eigen::Index half = c_dual.size() / 2;
    if (end == LinkEnd::Tx) {
        const Vec rotated = rotation_matrix(pol.phi, static_cast<int>(half)).cast<cxd>() * c_dual;
        return pol.b_tx() *
               (pol.rho_vv() * rotated.head(half) + pol.rho_vh() * rotated.tail(half));
    }
    return pol.b_rx() *
           (cxd(pol.xi_v(), 0.0) * c_dual.head(half) + pol.xi_h() * c_dual.tail(half));
}

RVec pattern_single(const Vec& c_single, const DictionarySet& dict) {
    if (c_single.size() != dict.geom.panel_size()) {
        throw std::invalid_argument("pattern_single expects a panel-sized beamformer");
    }
    return (dict.d.adjoint() * c_single).cwiseAbs2();
}

RVec pattern_vector(const Codeword& cw, const PolarizationState& pol, const DictionarySet& dict) {
    if (cw.pol != PolLayout::Dual || cw.w.size() != 2 * dict.geom.panel_size()) {
        throw std::invalid_argument("pattern_vector expects a dual-polarized codeword");
    }
    cw.validate();
    return (dict.d.adjoint() * fold_dual(cw.w, pol, cw.end)).cwiseAbs2();
}

SeCandidateSet SeCandidateSet::phase_ramps(int b_levels, int l_h, int l_v) {
    if (b_levels < 1) throw config_error("candidate family needs at least one level");
    SeCandidateSet set;
    auto make = [&](int len) {
        std::vector<Vec> out;
        out.reserve(b_levels);
        for (int level = 1; level <= b_levels; ++level) {
            const double slope = -kPi + 2.0 * kPi * level / b_levels;
            Vec q(len);
            for (int i = 0; i < len; ++i) q(i) = std::polar(1.0, slope * i);
            out.push_back(std::move(q));
        }
        return out;
    };
    set.q_h = make(l_h);
    set.q_v = make(l_v);
    return set;
}

Vec se_single_candidate(const Vec& q_lh, const Vec& q_lv, const DictionarySet& dict, int p,
                        int q) {
    if (q_lh.size() != dict.part.l_h || q_lv.size() != dict.part.l_v) {
        throw std::invalid_argument("combination vector length does not match sections per region");
    }
    const Vec ch = dict.d_h_block(p) * q_lh;
    const Vec cv = dict.d_v_block(q) * q_lv;
    if (ch.norm() < 1e-12 || cv.norm() < 1e-12) {
        throw candidate_error("combination vector annihilates its dictionary block");
    }
    Vec c = kron(ch, cv);
    const double n = c.norm();
    if (n < 1e-12) throw candidate_error("degenerate candidate beamformer");
    return c / n;
}

Vec mip_single(const DictionarySet& dict, int p, int q) {
    const Mat block = dict.d_block(p, q);
    const Mat a = block * block.adjoint();
    return dominant_eigenvector(a).vector;
}

Vec lift_tx(const Vec& c_single, const PolarizationState& pol) {
    if (std::abs(c_single.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("lift_tx expects a unit-norm single-polarization beamformer");
    }
    const Eigen::Index m = c_single.size();
    Vec stacked(2 * m);
    stacked.head(m) = std::conj(pol.rho_vv()) * c_single;
    stacked.tail(m) = std::conj(pol.rho_vh()) * c_single;
    Vec out = pol.b_tx() *
              (rotation_matrix(pol.phi, static_cast<int>(m)).transpose().cast<cxd>() * stacked);
    return out;
}

Vec lift_rx(const Vec& c_single, const PolarizationState& pol) {
    if (std::abs(c_single.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("lift_rx expects a unit-norm single-polarization beamformer");
    }
    const Eigen::Index m = c_single.size();
    Vec out(2 * m);
    out.head(m) = cxd(pol.xi_v(), 0.0) * c_single;
    out.tail(m) = std::conj(pol.xi_h()) * c_single;
    return pol.b_rx() * out;
}

SeSelection se_select(const SeCandidateSet& candidates, const DictionarySet& dict,
                      const PolarizationState& pol, int p, int q, LinkEnd end,
                      const std::optional<OmpSettings>& omp) {
    if (candidates.q_h.empty() || candidates.q_v.empty()) {
        throw config_error("empty SE candidate family");
    }
    const IdealPatternVector ideal = ideal_pattern(dict.part, dict.geom, p, q);

    bool found = false;
    SeSelection best;
    for (size_t ih = 0; ih < candidates.q_h.size(); ++ih) {
        for (size_t iv = 0; iv < candidates.q_v.size(); ++iv) {
            Vec single;
            try {
                single = se_single_candidate(candidates.q_h[ih], candidates.q_v[iv], dict, p, q);
            } catch (const candidate_error&) {
                continue;  // rejected candidate; try the next combination
            }
            Codeword cw;
            cw.criterion = Criterion::SE;
            cw.end = end;
            cw.pol = PolLayout::Dual;
            cw.p = p;
            cw.q = q;
            cw.w = (end == LinkEnd::Tx) ? lift_tx(single, pol) : lift_rx(single, pol);
            if (omp) {
                HybridBeamformer hb = omp_decompose(cw.w, omp->n_rf, omp->phase_bits);
                cw.w = hb.product();
                cw.hybrid = std::move(hb);
            }
            const RVec g = pattern_vector(cw, pol, dict);
            const double se = (ideal.g - g).squaredNorm();
            if (!found || se < best.squared_error) {
                found = true;
                best.chosen = std::move(cw);
                best.index_h = static_cast<int>(ih);
                best.index_v = static_cast<int>(iv);
                best.squared_error = se;
            }
        }
    }
    if (!found) throw candidate_error("every SE candidate was rejected");
    return best;
}

}  // namespace dpbeam

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

#include "dpbeam/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dpbeam/rng.hpp"

namespace dpbeam {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

bool finite_c(cxd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Per-end design: the single-polarization codebook plus the exportable
// dual-polarization book (hybrid-factorized implementable words).
void design_end(const ExperimentConfig& cfg, const EndConfig& ec, const DictionarySet& dict,
                const PolarizationState& design_pol, LinkEnd end, Codebook* single,
                Codebook* exported) {
    single->q_h = ec.q_h;
    single->q_v = ec.q_v;
    single->words.clear();
    exported->q_h = ec.q_h;
    exported->q_v = ec.q_v;
    exported->words.clear();

    const OmpSettings omp{cfg.n_rf, cfg.phase_bits};
    SeCandidateSet ramps;
    if (cfg.criterion == Criterion::SE) {
        ramps = SeCandidateSet::phase_ramps(cfg.candidate_b, ec.l_h, ec.l_v);
    }

    for (int p = 1; p <= ec.q_h; ++p) {
        for (int q = 1; q <= ec.q_v; ++q) {
            Vec c_single;
            Vec dual;
            std::optional<HybridBeamformer> hb;
            switch (cfg.criterion) {
                case Criterion::SE: {
                    const SeSelection sel = se_select(ramps, dict, design_pol, p, q, end, omp);
                    c_single = se_single_candidate(ramps.q_h[static_cast<size_t>(sel.index_h)],
                                                   ramps.q_v[static_cast<size_t>(sel.index_v)],
                                                   dict, p, q);
                    dual = sel.chosen.w;
                    hb = sel.chosen.hybrid;
                    break;
                }
                case Criterion::MIP: {
                    c_single = mip_single(dict, p, q);
                    const Vec lifted = (end == LinkEnd::Tx) ? lift_tx(c_single, design_pol)
                                                            : lift_rx(c_single, design_pol);
                    hb = omp_decompose(lifted, cfg.n_rf, cfg.phase_bits);
                    dual = hb->product();
                    break;
                }
                case Criterion::Baseline: {
                    c_single = steering_panel(dict.part.az_region_center(p),
                                              dict.part.el_region_center(q), dict.geom);
                    const Vec lifted =
                        (end == LinkEnd::Tx)
                            ? finalize_tx_codeword(c_single, cxd(1.0, 0.0), design_pol.chi,
                                                   design_pol.phi)
                            : alignment_rx_codeword(c_single, cxd(1.0, 0.0), cxd(1.0, 0.0));
                    hb = omp_decompose(lifted, cfg.n_rf, cfg.phase_bits);
                    dual = hb->product();
                    break;
                }
                case Criterion::Alignment:
                    throw config_error("criterion must be one of se, mip, baseline");
            }

            Codeword sw;
            sw.w = std::move(c_single);
            sw.criterion = cfg.criterion;
            sw.end = end;
            sw.pol = PolLayout::Single;
            sw.p = p;
            sw.q = q;
            single->words.push_back(std::move(sw));

            Codeword ew;
            ew.w = std::move(dual);
            ew.criterion = cfg.criterion;
            ew.end = end;
            ew.pol = PolLayout::Dual;
            ew.p = p;
            ew.q = q;
            ew.hybrid = std::move(hb);
            exported->words.push_back(std::move(ew));
        }
    }
}

}  // namespace

Codebook baseline_single_codebook(const ArrayGeometry& geom, const RegionPartition& part,
                                  LinkEnd end) {
    Codebook book;
    book.q_h = part.q_h;
    book.q_v = part.q_v;
    for (int p = 1; p <= part.q_h; ++p) {
        for (int q = 1; q <= part.q_v; ++q) {
            Codeword w;
            w.w = steering_panel(part.az_region_center(p), part.el_region_center(q), geom);
            w.criterion = Criterion::Baseline;
            w.end = end;
            w.pol = PolLayout::Single;
            w.p = p;
            w.q = q;
            book.words.push_back(std::move(w));
        }
    }
    return book;
}

Codebook baseline_codebook(const ArrayGeometry& geom, const RegionPartition& part,
                           const PolarizationState& design_pol, LinkEnd end) {
    Codebook single = baseline_single_codebook(geom, part, end);
    Codebook dual;
    dual.q_h = single.q_h;
    dual.q_v = single.q_v;
    for (const Codeword& s : single.words) {
        Codeword w = s;
        w.pol = PolLayout::Dual;
        w.w = (end == LinkEnd::Tx)
                  ? finalize_tx_codeword(s.w, cxd(1.0, 0.0), design_pol.chi, design_pol.phi)
                  : alignment_rx_codeword(s.w, cxd(1.0, 0.0), cxd(1.0, 0.0));
        dual.words.push_back(std::move(w));
    }
    return dual;
}

DesignArtifacts design_codebooks(const ExperimentConfig& cfg) {
    cfg.validate();
    ArrayGeometry tx_geom = cfg.tx.geometry();
    ArrayGeometry rx_geom = cfg.rx.geometry();
    RegionPartition tx_part = cfg.tx.partition();
    RegionPartition rx_part = cfg.rx.partition();
    DictionarySet tx_dict = build_dictionaries(tx_geom, tx_part);
    DictionarySet rx_dict = build_dictionaries(rx_geom, rx_part);
    PolarizationState design_pol(cfg.channel.chi_mean(), cfg.channel.phi_mean());

    Codebook tx_single, rx_single, tx_export, rx_export;
    design_end(cfg, cfg.tx, tx_dict, design_pol, LinkEnd::Tx, &tx_single, &tx_export);
    design_end(cfg, cfg.rx, rx_dict, design_pol, LinkEnd::Rx, &rx_single, &rx_export);

    Codebook tx_align, rx_align;
    if (cfg.criterion == Criterion::Baseline) {
        tx_align = baseline_codebook(tx_geom, tx_part, design_pol, LinkEnd::Tx);
        rx_align = baseline_codebook(rx_geom, rx_part, design_pol, LinkEnd::Rx);
    } else {
        std::tie(tx_align, rx_align) =
            alignment_codebooks(tx_single, rx_single, design_pol.chi, design_pol.phi);
    }

    return DesignArtifacts{tx_geom,
                           rx_geom,
                           tx_part,
                           rx_part,
                           std::move(tx_dict),
                           std::move(rx_dict),
                           design_pol,
                           std::move(tx_single),
                           std::move(rx_single),
                           std::move(tx_align),
                           std::move(rx_align),
                           std::move(tx_export),
                           std::move(rx_export),
                           build_pilots(cfg.pilot_j)};
}

TrialOutput data_rate_trial(const DesignArtifacts& art, const ExperimentConfig& cfg,
                            double snr_linear, std::uint64_t trial_seed) {
    const ChannelRealization ch =
        sample_channel(cfg.channel, art.tx_geom, art.rx_geom, mix_seed(trial_seed, 1));
    const AlignmentResult al =
        beam_align(ch, art.tx_align, art.rx_align, snr_linear, mix_seed(trial_seed, 2));

    TrialOutput out;
    out.alignment = al;
    const Codeword& at = art.tx_align.at(al.p_tx, al.q_tx);
    const Codeword& ar = art.rx_align.at(al.p_rx, al.q_rx);
    out.rate_alignment = pair_rate(ch, ar.w, at.w, snr_linear);

    if (!art.uses_pilots()) {
        out.rate = out.rate_alignment;
        return out;
    }

    const Vec& ct = art.tx_single.at(al.p_tx, al.q_tx).w;
    const Vec& cr = art.rx_single.at(al.p_rx, al.q_rx).w;
    const double chi_known = cfg.channel.chi_mean();
    const double phi_known = cfg.channel.phi_mean();
    try {
        const RatioEstimate est = estimate_ratios(ch, ct, cr, art.pilots, snr_linear, chi_known,
                                                  phi_known, mix_seed(trial_seed, 3));
        if (!finite_c(est.ratio_tx) || !finite_c(est.ratio_rx)) {
            throw estimation_error("non-finite ratio estimate");
        }
        const Vec ft = finalize_tx_codeword(ct, est.ratio_tx, chi_known, phi_known);
        const Vec fr = finalize_rx_codeword(cr, est.ratio_rx);
        out.rate = pair_rate(ch, fr, ft, snr_linear);
        out.ratio_tx = est.ratio_tx;
        out.ratio_rx = est.ratio_rx;
        out.estimated = true;
    } catch (const estimation_error&) {
        // Keep the alignment pair when the pilot exchange fails to produce
        // usable ratios; the trial still yields a rate.
        out.rate = out.rate_alignment;
    }
    return out;
}

double TrialBatch::mean_rate() const {
    if (rates.empty()) return 0.0;
    double s = 0.0;
    for (double r : rates) s += r;
    return s / static_cast<double>(rates.size());
}

double TrialBatch::stderr_rate() const {
    const size_t n = rates.size();
    if (n < 2) return 0.0;
    const double m = mean_rate();
    double ss = 0.0;
    for (double r : rates) ss += (r - m) * (r - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

TrialBatch run_trials(const DesignArtifacts& art, const ExperimentConfig& cfg, double snr_db,
                      int trials) {
    const double snr = db_to_linear(snr_db);
    TrialBatch batch;
    batch.rates.assign(static_cast<size_t>(trials), 0.0);
    batch.align_rates.assign(static_cast<size_t>(trials), 0.0);
    std::vector<unsigned char> fell_back(static_cast<size_t>(trials), 0);
    const bool pilots = art.uses_pilots();
    parallel_for(trials, cfg.threads, [&](int i) {
        const TrialOutput t =
            data_rate_trial(art, cfg, snr, mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        batch.rates[static_cast<size_t>(i)] = t.rate;
        batch.align_rates[static_cast<size_t>(i)] = t.rate_alignment;
        fell_back[static_cast<size_t>(i)] = (pilots && !t.estimated) ? 1 : 0;
    });
    batch.estimation_failures = 0;
    for (unsigned char f : fell_back) batch.estimation_failures += f;
    return batch;
}

std::vector<std::string> RateCurve::violations(const ExperimentConfig& cfg) const {
    std::vector<std::string> v;
    for (const RatePoint& pt : points) {
        if (!(pt.mean_rate >= 0.0)) {
            v.push_back("negative mean rate at snr_db=" + csv_number(pt.snr_db));
        }
    }
    for (size_t i = 1; i < points.size(); ++i) {
        const RatePoint& a = points[i - 1];
        const RatePoint& b = points[i];
        if (b.snr_db <= a.snr_db) continue;  // only ordered pairs are comparable
        const double slack = 3.0 * (a.stderr_rate + b.stderr_rate);
        if (b.mean_rate < a.mean_rate - slack) {
            v.push_back("mean rate drops from snr_db=" + csv_number(a.snr_db) +
                        " to snr_db=" + csv_number(b.snr_db) + " beyond 3 standard errors");
        }
    }
    if (cfg.channel.n_nlos == 0) {
        // Pure line-of-sight: the flat in-region pattern level bounds the mean
        // beamforming gain of both ends, so the mean rate cannot exceed
        // log2(1 + snr * 2 * Q_tx * Q_rx) up to numerical tolerance.
        const double q_product = static_cast<double>(cfg.tx.q_h) * cfg.tx.q_v *
                                 static_cast<double>(cfg.rx.q_h) * cfg.rx.q_v;
        for (const RatePoint& pt : points) {
            const double bound = std::log2(1.0 + db_to_linear(pt.snr_db) * 2.0 * q_product);
            if (pt.mean_rate > bound + 1e-6) {
                v.push_back("mean rate " + csv_number(pt.mean_rate) + " at snr_db=" +
                            csv_number(pt.snr_db) + " exceeds the line-of-sight bound " +
                            csv_number(bound));
            }
        }
    }
    return v;
}

RateOutput run_rate(const ExperimentConfig& cfg) {
    cfg.validate();
    const DesignArtifacts art = design_codebooks(cfg);
    RateOutput out;
    out.metadata = experiment_metadata(cfg);
    out.curve.points.reserve(cfg.snr_db.size());
    for (double snr_db : cfg.snr_db) {
        const TrialBatch batch = run_trials(art, cfg, snr_db, cfg.trials);
        out.curve.points.push_back(
            RatePoint{snr_db, batch.mean_rate(), batch.stderr_rate(), cfg.trials});
    }
    out.violations = out.curve.violations(cfg);
    return out;
}

void write_rate_csv(std::ostream& os, const CsvMetadata& metadata, const RateCurve& curve) {
    os << "#";
    for (const auto& [key, value] : metadata) os << " " << key << "=" << value;
    os << "\n";
    os << "snr_db,mean_rate,stderr,trials\n";
    for (const RatePoint& pt : curve.points) {
        os << csv_number(pt.snr_db) << "," << csv_number(pt.mean_rate) << ","
           << csv_number(pt.stderr_rate) << "," << pt.trials << "\n";
    }
}

CdfOutput run_cdf(const ExperimentConfig& cfg) {
    cfg.validate();
    const DesignArtifacts art = design_codebooks(cfg);
    CdfOutput out;
    out.snr_db = cfg.snr_db.front();
    out.metadata = experiment_metadata(cfg);
    TrialBatch batch = run_trials(art, cfg, out.snr_db, cfg.trials);
    out.rates = std::move(batch.rates);
    std::sort(out.rates.begin(), out.rates.end());
    return out;
}

void write_cdf_csv(std::ostream& os, const CdfOutput& cdf) {
    os << "#";
    for (const auto& [key, value] : cdf.metadata) os << " " << key << "=" << value;
    os << "\n";
    os << "rate,cdf\n";
    const double n = static_cast<double>(cdf.rates.size());
    for (size_t i = 0; i < cdf.rates.size(); ++i) {
        os << csv_number(cdf.rates[i]) << "," << csv_number(static_cast<double>(i + 1) / n)
           << "\n";
    }
}

Mat steering_response_grid(const Vec& fold, const ArrayGeometry& geom, const RVec& psi_az,
                           const RVec& psi_el) {
    if (fold.size() != geom.panel_size()) {
        throw std::invalid_argument("steering_response_grid: fold must be a panel vector");
    }
    Mat a_h(geom.m_h, psi_az.size());
    for (Eigen::Index i = 0; i < psi_az.size(); ++i) {
        a_h.col(i) = steering_unpaired(SpatialFreq(psi_az[i]), geom.m_h);
    }
    Mat a_v(geom.m_v, psi_el.size());
    for (Eigen::Index j = 0; j < psi_el.size(); ++j) {
        a_v.col(j) = steering_unpaired(SpatialFreq(psi_el[j]), geom.m_v);
    }
    // fold[ih*m_v + iv] viewed column-major as an m_v x m_h matrix.
    const Eigen::Map<const Mat> f(fold.data(), geom.m_v, geom.m_h);
    return a_v.adjoint() * f * a_h.conjugate();
}

PatternGrid reference_gain_grid(const Codeword& w, const PolarizationState& pol,
                                const ArrayGeometry& geom, const RegionPartition& part,
                                int az_points, int el_points) {
    if (az_points < 1 || el_points < 1) {
        throw std::invalid_argument("reference_gain_grid: grid must be non-empty");
    }
    const Vec fold = (w.pol == PolLayout::Dual) ? fold_dual(w.w, pol, w.end) : w.w;
    if (fold.size() != geom.panel_size()) {
        throw std::invalid_argument("reference_gain_grid: codeword does not match the geometry");
    }

    PatternGrid grid;
    grid.theta_az.resize(az_points);
    grid.theta_el.resize(el_points);
    const double az_lo = -std::numbers::pi / 2.0;
    const double az_step = std::numbers::pi / az_points;
    const double el_lo = -std::numbers::pi / 4.0;
    const double el_step = (std::numbers::pi / 2.0) / el_points;
    for (int i = 0; i < az_points; ++i) grid.theta_az[i] = az_lo + (i + 0.5) * az_step;
    for (int j = 0; j < el_points; ++j) grid.theta_el[j] = el_lo + (j + 0.5) * el_step;

    const Eigen::Map<const Mat> f(fold.data(), geom.m_v, geom.m_h);
    grid.gain.resize(el_points, az_points);
    Mat a_h(geom.m_h, az_points);
    for (int j = 0; j < el_points; ++j) {
        const double el = grid.theta_el[j];
        const Vec a_v = steering_unpaired(paired_el_freq(el), geom.m_v);
        for (int i = 0; i < az_points; ++i) {
            a_h.col(i) = steering_unpaired(paired_az_freq(grid.theta_az[i], el), geom.m_h);
        }
        const Mat row = a_v.adjoint() * f * a_h.conjugate();  // 1 x az_points
        grid.gain.row(j) = row.cwiseAbs2().row(0).real();
    }
    grid.ideal_gain = ideal_pattern(part, geom, 1, 1).gain;
    return grid;
}

PatternOutput run_pattern(const ExperimentConfig& cfg) {
    cfg.validate();
    const DesignArtifacts art = design_codebooks(cfg);
    PatternOutput out;
    out.p = (cfg.pattern_p == 0) ? (cfg.tx.q_h + 1) / 2 : cfg.pattern_p;
    out.q = (cfg.pattern_q == 0) ? (cfg.tx.q_v + 1) / 2 : cfg.pattern_q;
    const Codeword& w = art.tx_export.at(out.p, out.q);
    out.grid = reference_gain_grid(w, art.design_pol, art.tx_geom, art.tx_part,
                                   cfg.pattern_az_points, cfg.pattern_el_points);
    out.metadata = experiment_metadata(cfg);
    out.metadata.emplace_back("pattern_p", std::to_string(out.p));
    out.metadata.emplace_back("pattern_q", std::to_string(out.q));
    out.metadata.emplace_back("az_points", std::to_string(cfg.pattern_az_points));
    out.metadata.emplace_back("el_points", std::to_string(cfg.pattern_el_points));
    out.metadata.emplace_back("ideal_gain", csv_number(out.grid.ideal_gain));
    return out;
}

void write_pattern_csv(std::ostream& os, const PatternOutput& out) {
    os << "#";
    for (const auto& [key, value] : out.metadata) os << " " << key << "=" << value;
    os << "\n";
    os << "theta_az,theta_el,gain,gain_db,gain_normalized\n";
    for (Eigen::Index i = 0; i < out.grid.theta_az.size(); ++i) {
        for (Eigen::Index j = 0; j < out.grid.theta_el.size(); ++j) {
            const double g = out.grid.gain(j, i);
            os << csv_number(out.grid.theta_az[i]) << "," << csv_number(out.grid.theta_el[j])
               << "," << csv_number(g) << "," << csv_number(10.0 * std::log10(g)) << ","
               << csv_number(g / out.grid.ideal_gain) << "\n";
        }
    }
}

DesignOutput run_design(const ExperimentConfig& cfg) {
    const DesignArtifacts art = design_codebooks(cfg);
    return run_design(cfg, art);
}

DesignOutput run_design(const ExperimentConfig& cfg, const DesignArtifacts& art) {
    DesignOutput out;
    out.metadata = experiment_metadata(cfg);
    auto emit = [&](const Codebook& single, const Codebook& exported) {
        for (size_t k = 0; k < single.words.size(); ++k) {
            for (CodebookCsvRow& r : codeword_rows(single.words[k])) out.rows.push_back(std::move(r));
            for (CodebookCsvRow& r : codeword_rows(exported.words[k])) out.rows.push_back(std::move(r));
        }
    };
    emit(art.tx_single, art.tx_export);
    emit(art.rx_single, art.rx_export);
    return out;
}

// ---------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------

namespace {

Vec random_unit(Rng& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = complex_normal(rng);
    const double nrm = v.norm();
    return v / nrm;
}

PolarizationState random_pol(Rng& rng) {
    const double pi = std::numbers::pi;
    return PolarizationState(uniform_real(rng, 0.1, 0.6), uniform_real(rng, -0.4, 0.4),
                             uniform_real(rng, -pi, pi), uniform_real(rng, -pi, pi),
                             uniform_real(rng, -pi, pi), uniform_real(rng, -pi, pi));
}

ExperimentConfig desk_config(Criterion crit, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.tx = EndConfig{4, 4, 2, 2, 2, 2};
    cfg.rx = EndConfig{4, 4, 2, 2, 2, 2};
    cfg.n_rf = 2;
    cfg.phase_bits = 4;
    cfg.criterion = crit;
    cfg.pilot_j = 1;
    cfg.snr_db = {0.0};
    cfg.trials = 48;
    cfg.seed = seed;
    cfg.candidate_b = 3;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

int run_verify(const ExperimentConfig& cfg, std::ostream& os) {
    int failures = 0;
    auto check = [&](const char* name, auto&& fn) {
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = e.what();
            ok = false;
        }
        if (ok) {
            os << "ok -- " << name << "\n";
        } else {
            os << "FAIL -- " << name << (detail.empty() ? "" : ": " + detail) << "\n";
            ++failures;
        }
    };
    const std::uint64_t seed = cfg.seed;

    check("steering vectors have unit norm", [&](std::string& detail) {
        Rng rng = make_rng(mix_seed(seed, 101));
        const ArrayGeometry geom(4, 8);
        for (int t = 0; t < 8; ++t) {
            const Vec u = steering_unpaired(SpatialFreq(uniform_real(rng, -3.1, 3.1)), 16);
            const Vec p = steering_paired(uniform_real(rng, -1.5, 1.5),
                                          uniform_real(rng, -0.7, 0.7), geom);
            if (std::abs(u.norm() - 1.0) > 1e-12 || std::abs(p.norm() - 1.0) > 1e-12) {
                detail = "norm deviates beyond 1e-12";
                return false;
            }
        }
        return true;
    });

    check("dictionary region blocks match the section indexing", [&](std::string& detail) {
        const ArrayGeometry geom(4, 8);
        const RegionPartition part(4, 4, 2, 2);
        const DictionarySet dict = build_dictionaries(geom, part);
        for (int p = 1; p <= part.q_h; ++p) {
            for (int q = 1; q <= part.q_v; ++q) {
                const Mat block = dict.d_block(p, q);
                const std::vector<int> idx = part.region_section_indices(p, q);
                if (static_cast<int>(idx.size()) != block.cols()) {
                    detail = "index count mismatch";
                    return false;
                }
                for (size_t k = 0; k < idx.size(); ++k) {
                    if ((block.col(static_cast<Eigen::Index>(k)) - dict.d.col(idx[k])).norm() >
                        1e-14) {
                        detail = "block column differs from dictionary column";
                        return false;
                    }
                }
            }
        }
        return true;
    });

    check("region transform preserves the in-region pattern", [&](std::string& detail) {
        Rng rng = make_rng(mix_seed(seed, 102));
        const ArrayGeometry geom(4, 8);
        const RegionPartition part(4, 4, 2, 2);
        const DictionarySet dict = build_dictionaries(geom, part);
        for (int t = 0; t < 6; ++t) {
            const Vec c = random_unit(rng, geom.panel_size());
            const int p = 1 + static_cast<int>(mix_seed(seed, 103, static_cast<std::uint64_t>(t)) %
                                               static_cast<std::uint64_t>(part.q_h));
            const int q = 1 + static_cast<int>(mix_seed(seed, 104, static_cast<std::uint64_t>(t)) %
                                               static_cast<std::uint64_t>(part.q_v));
            const Vec tposed = region_transform(c, p, q, geom, part);
            const RVec ref = (dict.d_block(1, 1).adjoint() * c).cwiseAbs2();
            const RVec got = (dict.d_block(p, q).adjoint() * tposed).cwiseAbs2();
            if ((ref - got).cwiseAbs().maxCoeff() > 1e-12) {
                detail = "translated pattern differs beyond 1e-12";
                return false;
            }
        }
        return true;
    });

    check("polarization lifts preserve the beam pattern", [&](std::string& detail) {
        Rng rng = make_rng(mix_seed(seed, 105));
        const ArrayGeometry geom(4, 8);
        const RegionPartition part(4, 4, 2, 2);
        const DictionarySet dict = build_dictionaries(geom, part);
        for (int t = 0; t < 6; ++t) {
            const PolarizationState pol = random_pol(rng);
            const Vec c = random_unit(rng, geom.panel_size());
            const RVec base = pattern_single(c, dict);
            Codeword tx;
            tx.w = lift_tx(c, pol);
            tx.end = LinkEnd::Tx;
            tx.pol = PolLayout::Dual;
            Codeword rx;
            rx.w = lift_rx(c, pol);
            rx.end = LinkEnd::Rx;
            rx.pol = PolLayout::Dual;
            if ((pattern_vector(tx, pol, dict) - base).cwiseAbs().maxCoeff() > 1e-12 ||
                (pattern_vector(rx, pol, dict) - base).cwiseAbs().maxCoeff() > 1e-12) {
                detail = "lifted pattern differs beyond 1e-12";
                return false;
            }
        }
        return true;
    });

    check("transmit gain factorizes across panel and polarization", [&](std::string& detail) {
        Rng rng = make_rng(mix_seed(seed, 106));
        const ArrayGeometry tx_geom(4, 4);
        const ArrayGeometry rx_geom(4, 4);
        for (int t = 0; t < 20; ++t) {
            const PolarizationState pol = random_pol(rng);
            const cxd h0 = random_phase(rng);
            const double aod_az = uniform_real(rng, -1.5, 1.5);
            const double aod_el = uniform_real(rng, -0.7, 0.7);
            const double aoa_az = uniform_real(rng, -1.5, 1.5);
            const double aoa_el = uniform_real(rng, -0.7, 0.7);
            const Mat h0_tx =
                tx_side_los(pol, h0, aod_az, aod_el, aoa_az, aoa_el, tx_geom, rx_geom);
            const Vec c_rx = random_unit(rng, rx_geom.panel_size());
            const Vec c_tx = random_unit(rng, 2 * tx_geom.panel_size());
            const double lhs = std::norm(c_rx.dot(h0_tx * c_tx));

            const Vec d_tx = steering_paired(aod_az, aod_el, tx_geom);
            const Vec d_rx = steering_paired(aoa_az, aoa_el, rx_geom);
            const Vec rotated =
                rotation_matrix(pol.phi, tx_geom.panel_size()).cast<cxd>() * c_tx;
            const cxd s = pol.rho_vv() * d_tx.dot(rotated.head(tx_geom.panel_size())) +
                          pol.rho_vh() * d_tx.dot(rotated.tail(tx_geom.panel_size()));
            const double rhs = std::norm(h0) * std::norm(c_rx.dot(d_rx)) * std::norm(s);
            if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, lhs)) {
                detail = "factorization mismatch beyond 1e-10";
                return false;
            }
        }
        return true;
    });

    check("in-region projection beamformer dominates random candidates",
          [&](std::string& detail) {
              Rng rng = make_rng(mix_seed(seed, 107));
              const ArrayGeometry geom(4, 8);
              const RegionPartition part(2, 2, 2, 2);
              const DictionarySet dict = build_dictionaries(geom, part);
              for (int p = 1; p <= part.q_h; ++p) {
                  for (int q = 1; q <= part.q_v; ++q) {
                      const Mat block = dict.d_block(p, q);
                      const Vec v = mip_single(dict, p, q);
                      const double best = (block.adjoint() * v).squaredNorm();
                      for (int t = 0; t < 200; ++t) {
                          const Vec r = random_unit(rng, geom.panel_size());
                          if ((block.adjoint() * r).squaredNorm() > best + 1e-9) {
                              detail = "random vector beats the dominant eigenvector";
                              return false;
                          }
                      }
                  }
              }
              return true;
          });

    check("oversampled single-region projection hits the closed form", [&](std::string& detail) {
        const ArrayGeometry geom(4, 1);
        const RegionPartition part(1, 1, 8, 1);
        const DictionarySet dict = build_dictionaries(geom, part);
        const Vec v = mip_single(dict, 1, 1);
        const double got = (dict.d_block(1, 1).adjoint() * v).squaredNorm();
        const double want = static_cast<double>(part.l_h) / geom.m_h;
        if (std::abs(got - want) > 1e-9) {
            detail = "quotient " + csv_number(got) + " != " + csv_number(want);
            return false;
        }
        return true;
    });

    check("hybrid factors satisfy modulus, grid, and norm constraints",
          [&](std::string& detail) {
              Rng rng = make_rng(mix_seed(seed, 108));
              for (int t = 0; t < 4; ++t) {
                  const Vec target = random_unit(rng, 32);
                  const HybridBeamformer hb = omp_decompose(target, 3, 4);
                  hb.validate();
                  if (std::abs(hb.product().norm() - 1.0) > 1e-10) {
                      detail = "product norm deviates beyond 1e-10";
                      return false;
                  }
              }
              return true;
          });

    check("hybrid projection residual never increases with extra chains",
          [&](std::string& detail) {
              Rng rng = make_rng(mix_seed(seed, 109));
              for (int t = 0; t < 4; ++t) {
                  const Vec target = random_unit(rng, 32);
                  double prev = std::numeric_limits<double>::infinity();
                  for (int n = 1; n <= 4; ++n) {
                      const HybridBeamformer hb = omp_decompose(target, n);
                      const Vec u = (hb.analog.adjoint() * hb.analog)
                                        .ldlt()
                                        .solve(hb.analog.adjoint() * target);
                      const double res = (target - hb.analog * u).norm();
                      if (res > prev + 1e-12) {
                          detail = "residual increased from " + csv_number(prev) + " to " +
                                   csv_number(res);
                          return false;
                      }
                      prev = res;
                  }
              }
              return true;
          });

    check("pilot schedules meet their block-sum conditions", [&](std::string& detail) {
        for (int j : {1, 2, 4, 8, 16, 64}) {
            if (!build_pilots(j).check()) {
                detail = "schedule j=" + std::to_string(j) + " fails";
                return false;
            }
        }
        return true;
    });

    check("noiseless single-path ratios are exact", [&](std::string& detail) {
        Rng rng = make_rng(mix_seed(seed, 110));
        ChannelConfig cc;
        cc.n_nlos = 0;
        cc.chi_min = cc.chi_max = 0.3;
        cc.phi_min = cc.phi_max = 0.05;
        const ArrayGeometry geom(4, 4);
        const double inf = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 4; ++t) {
            const ChannelRealization ch =
                sample_channel(cc, geom, geom, mix_seed(seed, 111, static_cast<std::uint64_t>(t)));
            const Vec ct = random_unit(rng, geom.panel_size());
            const Vec cr = random_unit(rng, geom.panel_size());
            const RatioEstimate est = estimate_ratios(ch, ct, cr, build_pilots(1), inf, 0.3, 0.05,
                                                      mix_seed(seed, 112));
            if (std::abs(est.ratio_tx - ch.pol.tx_phase_ratio()) > 1e-9 ||
                std::abs(est.ratio_rx - ch.pol.rx_ratio()) > 1e-9) {
                detail = "estimate deviates from ground truth beyond 1e-9";
                return false;
            }
        }
        return true;
    });

    check("finalized codewords reproduce the matched lift", [&](std::string& detail) {
        Rng rng = make_rng(mix_seed(seed, 113));
        for (int t = 0; t < 6; ++t) {
            const PolarizationState pol = random_pol(rng);
            const Vec c = random_unit(rng, 16);
            const Vec ft = finalize_tx_codeword(c, pol.tx_phase_ratio(), pol.chi, pol.phi);
            const Vec fr = finalize_rx_codeword(c, pol.rx_ratio());
            if (std::abs(std::abs(ft.dot(lift_tx(c, pol))) - 1.0) > 1e-9 ||
                std::abs(std::abs(fr.dot(lift_rx(c, pol))) - 1.0) > 1e-9) {
                detail = "inner product with the lift deviates from 1 beyond 1e-9";
                return false;
            }
        }
        return true;
    });

    check("alignment returns the arg-max pair", [&](std::string& detail) {
        const ExperimentConfig small = desk_config(Criterion::MIP, mix_seed(seed, 114));
        const DesignArtifacts art = design_codebooks(small);
        const double inf = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 3; ++t) {
            const ChannelRealization ch = sample_channel(
                small.channel, art.tx_geom, art.rx_geom, mix_seed(seed, 115, static_cast<std::uint64_t>(t)));
            const AlignmentResult got = beam_align(ch, art.tx_align, art.rx_align, inf, 0);
            double best = -1.0;
            for (const Codeword& wt : art.tx_align.words) {
                for (const Codeword& wr : art.rx_align.words) {
                    best = std::max(best, std::norm(wr.w.dot(ch.h * wt.w)));
                }
            }
            if (std::abs(got.metric - best) > 1e-9 * std::max(1.0, best)) {
                detail = "selected pair metric is not the maximum";
                return false;
            }
        }
        return true;
    });

    check("trials reproduce bit-for-bit for a fixed seed", [&](std::string& detail) {
        const ExperimentConfig small = desk_config(Criterion::SE, mix_seed(seed, 116));
        const DesignArtifacts art = design_codebooks(small);
        const TrialOutput a = data_rate_trial(art, small, db_to_linear(0.0), mix_seed(seed, 117));
        const TrialOutput b = data_rate_trial(art, small, db_to_linear(0.0), mix_seed(seed, 117));
        if (a.rate != b.rate || a.rate_alignment != b.rate_alignment ||
            a.alignment.p_tx != b.alignment.p_tx || a.alignment.q_tx != b.alignment.q_tx ||
            a.alignment.p_rx != b.alignment.p_rx || a.alignment.q_rx != b.alignment.q_rx) {
            detail = "same-seed trials differ";
            return false;
        }
        return true;
    });

    check("thread count does not change results", [&](std::string& detail) {
        ExperimentConfig small = desk_config(Criterion::SE, mix_seed(seed, 118));
        const DesignArtifacts art = design_codebooks(small);
        small.threads = 1;
        const TrialBatch serial = run_trials(art, small, -5.0, small.trials);
        small.threads = 4;
        const TrialBatch parallel = run_trials(art, small, -5.0, small.trials);
        if (serial.rates != parallel.rates || serial.align_rates != parallel.align_rates ||
            serial.estimation_failures != parallel.estimation_failures) {
            detail = "parallel batch differs from serial batch";
            return false;
        }
        return true;
    });

    check("repeated runs emit identical output", [&](std::string& detail) {
        ExperimentConfig small = desk_config(Criterion::MIP, mix_seed(seed, 119));
        small.trials = 32;
        small.snr_db = {-5.0, 5.0};
        std::ostringstream a, b;
        const RateOutput ra = run_rate(small);
        write_rate_csv(a, ra.metadata, ra.curve);
        const RateOutput rb = run_rate(small);
        write_rate_csv(b, rb.metadata, rb.curve);
        if (a.str() != b.str()) {
            detail = "two identical runs produced different bytes";
            return false;
        }
        return true;
    });

    check("rate curve invariants hold on a reference run", [&](std::string& detail) {
        ExperimentConfig small = desk_config(Criterion::SE, mix_seed(seed, 120));
        small.trials = 96;
        small.snr_db = {-5.0, 5.0};
        const RateOutput out = run_rate(small);
        if (!out.violations.empty()) {
            detail = out.violations.front();
            return false;
        }
        ExperimentConfig los = small;
        los.channel.n_nlos = 0;
        const RateOutput out_los = run_rate(los);
        if (!out_los.violations.empty()) {
            detail = out_los.violations.front();
            return false;
        }
        return true;
    });

    os << (failures == 0 ? "verify: all checks passed" : "verify: FAILURES") << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace dpbeam

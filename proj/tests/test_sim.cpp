// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration, Monte-Carlo trial pipeline, CSV writers, pattern
// grids, and the self-check suite.

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dpbeam/codebook_csv.hpp"
#include "dpbeam/rng.hpp"
#include "dpbeam/sim.hpp"

using namespace dpbeam;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig small_config(Criterion crit = Criterion::SE) {
    ExperimentConfig cfg;
    cfg.tx = EndConfig{4, 4, 2, 2, 2, 2};
    cfg.rx = EndConfig{4, 4, 2, 2, 2, 2};
    cfg.n_rf = 2;
    cfg.phase_bits = 4;
    cfg.criterion = crit;
    cfg.snr_db = {0.0, 10.0};
    cfg.trials = 32;
    cfg.seed = 17;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("decibel conversions") {
    CHECK(db_to_linear(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(db_to_linear(13.2) == doctest::Approx(20.892961308540396).epsilon(1e-12));
    CHECK(linear_to_db(db_to_linear(-7.3)) == doctest::Approx(-7.3).epsilon(1e-12));
}

TEST_CASE("configuration defaults") {
    const ExperimentConfig cfg = parse_config_json("{}", "inline");
    CHECK(cfg.tx.m_h == 8);
    CHECK(cfg.tx.m_v == 8);
    CHECK(cfg.tx.q_h == 6);
    CHECK(cfg.tx.q_v == 6);
    CHECK(cfg.tx.l_h == 7);
    CHECK(cfg.tx.l_v == 7);
    CHECK(cfg.rx.m_h == 8);
    CHECK(cfg.n_rf == 4);
    REQUIRE(cfg.phase_bits.has_value());
    CHECK(*cfg.phase_bits == 4);
    CHECK(cfg.criterion == Criterion::SE);
    CHECK(cfg.pilot_j == 1);
    CHECK(cfg.trials == 1000);
    CHECK(cfg.seed == 1);
    CHECK(cfg.candidate_b == 3);
    CHECK(cfg.channel.k_db == doctest::Approx(13.2));
    CHECK(cfg.channel.n_nlos == 3);
    CHECK(cfg.channel.chi_min == doctest::Approx(0.25));
    CHECK(cfg.channel.chi_max == doctest::Approx(0.35));
    CHECK(cfg.channel.phi_min == doctest::Approx(-kPi / 36.0));
    CHECK(cfg.channel.phi_max == doctest::Approx(kPi / 36.0));
    REQUIRE(cfg.snr_db.size() == 7);
    CHECK(cfg.snr_db.front() == doctest::Approx(-10.0));
    CHECK(cfg.snr_db.back() == doctest::Approx(20.0));
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("configuration parsing applies overrides and rejects bad input") {
    const std::string text = R"({
        "tx": {"m_h": 4, "m_v": 2, "q_h": 2, "q_v": 2, "l_h": 3, "l_v": 3},
        "criterion": "mip",
        "pilot_j": 4,
        "snr_db": [-5, 0, 5],
        "trials": 10,
        "seed": 99,
        "phase_bits": null,
        "channel": {"k_db": 10.0, "n_nlos": 1, "chi": [0.3, 0.3], "phi": [0, 0]},
        "pattern": {"p": 2, "q": 1, "az_points": 11, "el_points": 7}
    })";
    const ExperimentConfig cfg = parse_config_json(text, "inline");
    CHECK(cfg.tx.m_h == 4);
    CHECK(cfg.tx.l_h == 3);
    CHECK(cfg.rx.m_h == 8);  // untouched end keeps defaults
    CHECK(cfg.criterion == Criterion::MIP);
    CHECK(cfg.pilot_j == 4);
    CHECK_FALSE(cfg.phase_bits.has_value());
    CHECK(cfg.seed == 99);
    CHECK(cfg.channel.n_nlos == 1);
    CHECK(cfg.pattern_p == 2);
    CHECK(cfg.pattern_q == 1);
    CHECK(cfg.pattern_az_points == 11);

    CHECK_THROWS_AS(parse_config_json("{\"bogus\": 1}", "inline"), config_error);
    CHECK_THROWS_AS(parse_config_json("{\"tx\": {\"bogus\": 1}}", "inline"), config_error);
    CHECK_THROWS_AS(parse_config_json("{\"trials\": 0}", "inline"), config_error);
    CHECK_THROWS_AS(parse_config_json("{\"snr_db\": []}", "inline"), config_error);
    CHECK_THROWS_AS(parse_config_json("{\"criterion\": \"nope\"}", "inline"), config_error);
    CHECK_THROWS_AS(parse_config_json("{\"pattern\": {\"p\": 99}}", "inline"), config_error);

    // Syntax errors carry the line number.
    try {
        parse_config_json("{\n  \"trials\": 5,\n  oops\n}", "inline");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string what = e.what();
        CHECK(what.find("line") != std::string::npos);
    }

    CHECK_THROWS_AS(load_config("/nonexistent/path/cfg.json"), io_error);
}

TEST_CASE("metadata echo ignores output-only fields") {
    ExperimentConfig a = small_config();
    ExperimentConfig b = a;
    b.threads = 8;
    b.out = "/tmp/somewhere.csv";
    const CsvMetadata ma = experiment_metadata(a);
    const CsvMetadata mb = experiment_metadata(b);
    REQUIRE(ma.size() == mb.size());
    for (size_t i = 0; i < ma.size(); ++i) {
        CHECK(ma[i].first == mb[i].first);
        CHECK(ma[i].second == mb[i].second);
    }
    CHECK(ma[0].first == "format");
    CHECK(ma[0].second == "dpbeam-csv-1");
}

TEST_CASE("csv numbers use nine significant digits") {
    CHECK(csv_number(0.5) == "0.5");
    CHECK(csv_number(1.0 / 3.0) == "0.333333333");
    CHECK(csv_number(1e10) == "1e+10");
    CHECK(csv_number(-2.0) == "-2");
    CHECK(csv_number(0.0) == "0");
}

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h.store(0);
    parallel_for(257, 4, [&](int i) { hits[size_t(i)].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);

    parallel_for(16, 0, [](int) {});  // hardware default thread count

    CHECK_THROWS_AS(
        parallel_for(64, 4,
                     [](int i) {
                         if (i == 31) throw std::runtime_error("boom");
                     }),
        std::runtime_error);
}

TEST_CASE("design artifacts have coherent books") {
    const ExperimentConfig cfg = small_config();
    const DesignArtifacts art = design_codebooks(cfg);
    CHECK(art.tx_geom.m_h == 4);
    REQUIRE(art.tx_single.size() == 4);
    REQUIRE(art.tx_align.size() == 4);
    REQUIRE(art.tx_export.size() == 4);
    CHECK(art.uses_pilots());
    CHECK(art.pilots.j == cfg.pilot_j);
    for (int p = 1; p <= 2; ++p) {
        for (int q = 1; q <= 2; ++q) {
            CHECK(art.tx_single.at(p, q).pol == PolLayout::Single);
            CHECK_NOTHROW(art.tx_single.at(p, q).validate());
            CHECK(art.tx_align.at(p, q).pol == PolLayout::Dual);
            CHECK_NOTHROW(art.tx_align.at(p, q).validate());
            REQUIRE(art.tx_export.at(p, q).hybrid.has_value());
            CHECK_NOTHROW(art.tx_export.at(p, q).hybrid->validate());
            CHECK((art.tx_export.at(p, q).hybrid->product() - art.tx_export.at(p, q).w).norm() <
                  1e-12);
        }
    }
    // Design is deterministic.
    const DesignArtifacts art2 = design_codebooks(cfg);
    CHECK((art.tx_export.at(2, 2).w - art2.tx_export.at(2, 2).w).norm() == 0.0);
}

TEST_CASE("baseline books duplicate the steering vector across ports") {
    const ArrayGeometry geom(4, 4);
    const RegionPartition part(2, 2, 2, 2);
    const PolarizationState pol(0.3, 0.0, 0.0, 0.0, 0.0, 0.0);
    const Codebook single = baseline_single_codebook(geom, part, LinkEnd::Rx);
    REQUIRE(single.size() == part.region_count());
    const Codebook book = baseline_codebook(geom, part, pol, LinkEnd::Rx);
    REQUIRE(book.size() == part.region_count());
    for (int p = 1; p <= 2; ++p) {
        for (int q = 1; q <= 2; ++q) {
            const Codeword& w = book.at(p, q);
            CHECK(w.criterion == Criterion::Baseline);
            CHECK_NOTHROW(w.validate());
            const Vec c = single.at(p, q).w;
            const int n = geom.panel_size();
            // Receive: equal weights on both port blocks.
            CHECK((w.w.head(n) - c / std::sqrt(2.0)).norm() < 1e-12);
            CHECK((w.w.tail(n) - c / std::sqrt(2.0)).norm() < 1e-12);
        }
    }
}

TEST_CASE("trials are reproducible and track the high-SNR expansion") {
    const ExperimentConfig cfg = small_config();
    const DesignArtifacts art = design_codebooks(cfg);

    const std::uint64_t trial_seed = mix_seed(cfg.seed, 3);
    const TrialOutput a = data_rate_trial(art, cfg, db_to_linear(60.0), trial_seed);
    const TrialOutput b = data_rate_trial(art, cfg, db_to_linear(60.0), trial_seed);
    CHECK(a.rate == b.rate);
    CHECK(a.rate_alignment == b.rate_alignment);
    CHECK(a.estimated == b.estimated);
    CHECK(a.estimated);

    // 20 dB more SNR adds log2(100) bits once the rate is SNR-dominated.
    const TrialOutput c = data_rate_trial(art, cfg, db_to_linear(80.0), trial_seed);
    CHECK(std::abs((c.rate - a.rate) - std::log2(100.0)) < 0.01);
}

TEST_CASE("estimation falls back to the aligned pair when ratios cannot form") {
    ExperimentConfig cfg = small_config();
    cfg.channel.chi_min = 0.0;
    cfg.channel.chi_max = 0.0;  // no cross-polar leakage: Y2 collapses
    const DesignArtifacts art = design_codebooks(cfg);
    const TrialOutput out = data_rate_trial(art, cfg, db_to_linear(10.0), mix_seed(cfg.seed, 0));
    CHECK_FALSE(out.estimated);
    CHECK(out.rate == out.rate_alignment);
}

TEST_CASE("trial batches are independent of the thread count") {
    ExperimentConfig cfg = small_config();
    const DesignArtifacts art = design_codebooks(cfg);
    cfg.threads = 1;
    const TrialBatch t1 = run_trials(art, cfg, 0.0, 24);
    cfg.threads = 4;
    const TrialBatch t4 = run_trials(art, cfg, 0.0, 24);
    REQUIRE(t1.rates.size() == 24);
    REQUIRE(t4.rates.size() == 24);
    for (size_t i = 0; i < t1.rates.size(); ++i) {
        CHECK(t1.rates[i] == t4.rates[i]);
        CHECK(t1.align_rates[i] == t4.align_rates[i]);
    }
    CHECK(t1.estimation_failures == t4.estimation_failures);

    // Mean and standard error agree with a direct computation.
    double mean = 0.0;
    for (double r : t1.rates) mean += r;
    mean /= double(t1.rates.size());
    double var = 0.0;
    for (double r : t1.rates) var += (r - mean) * (r - mean);
    var /= double(t1.rates.size() - 1);
    CHECK(t1.mean_rate() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(t1.stderr_rate() ==
          doctest::Approx(std::sqrt(var / double(t1.rates.size()))).epsilon(1e-12));
}

TEST_CASE("rate runs satisfy their invariants and serialize deterministically") {
    const ExperimentConfig cfg = small_config();
    const RateOutput out = run_rate(cfg);
    REQUIRE(out.curve.points.size() == cfg.snr_db.size());
    CHECK(out.violations.empty());
    for (const RatePoint& p : out.curve.points) {
        CHECK(p.trials == cfg.trials);
        CHECK(p.mean_rate >= 0.0);
        CHECK(std::isfinite(p.stderr_rate));
    }
    CHECK(out.curve.points[1].mean_rate > out.curve.points[0].mean_rate);

    const RateOutput out2 = run_rate(cfg);
    std::ostringstream s1, s2;
    write_rate_csv(s1, out.metadata, out.curve);
    write_rate_csv(s2, out2.metadata, out2.curve);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().rfind("# format=dpbeam-csv-1", 0) == 0);
    CHECK(s1.str().find("snr_db,mean_rate,stderr,trials") != std::string::npos);
}

TEST_CASE("pure direct-path runs respect the flat in-region rate bound") {
    ExperimentConfig cfg = small_config();
    cfg.channel.n_nlos = 0;
    cfg.snr_db = {5.0};
    cfg.trials = 64;
    const RateOutput out = run_rate(cfg);
    CHECK(out.violations.empty());
    const double q_product = double(cfg.tx.q_h * cfg.tx.q_v) * double(cfg.rx.q_h * cfg.rx.q_v);
    const double bound = std::log2(1.0 + db_to_linear(5.0) * 2.0 * q_product);
    CHECK(out.curve.points[0].mean_rate <= bound + 1e-6);
}

TEST_CASE("rate-curve violation detection flags corrupted curves") {
    const ExperimentConfig cfg = small_config();
    RateCurve curve;
    curve.points.push_back(RatePoint{0.0, 2.0, 0.01, 100});
    curve.points.push_back(RatePoint{10.0, 1.0, 0.01, 100});  // big drop
    CHECK_FALSE(curve.violations(cfg).empty());

    RateCurve negative;
    negative.points.push_back(RatePoint{0.0, -0.5, 0.01, 100});
    CHECK_FALSE(negative.violations(cfg).empty());
}

TEST_CASE("cdf runs sort ascending and serialize byte-identically") {
    ExperimentConfig cfg = small_config();
    cfg.snr_db = {0.0, 10.0};  // cdf uses the first entry
    cfg.trials = 48;
    const CdfOutput cdf = run_cdf(cfg);
    CHECK(cdf.snr_db == doctest::Approx(0.0));
    REQUIRE(int(cdf.rates.size()) == cfg.trials);
    for (size_t i = 1; i < cdf.rates.size(); ++i) CHECK(cdf.rates[i] >= cdf.rates[i - 1]);

    const CdfOutput cdf2 = run_cdf(cfg);
    std::ostringstream s1, s2;
    write_cdf_csv(s1, cdf);
    write_cdf_csv(s2, cdf2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("rate,cdf") != std::string::npos);
    // Final cdf value is exactly 1.
    const std::string text = s1.str();
    const size_t lastcomma = text.rfind(",");
    CHECK(text.substr(lastcomma + 1) == "1\n");
}

TEST_CASE("the baseline criterion never beats the finalized design on direct paths") {
    ExperimentConfig se_cfg = small_config(Criterion::SE);
    se_cfg.channel.n_nlos = 0;
    se_cfg.snr_db = {10.0};
    se_cfg.trials = 150;
    ExperimentConfig base_cfg = se_cfg;
    base_cfg.criterion = Criterion::Baseline;

    const RateOutput se = run_rate(se_cfg);
    const RateOutput base = run_rate(base_cfg);
    CHECK(se.curve.points[0].mean_rate >= base.curve.points[0].mean_rate);
}

TEST_CASE("reference gain grids hit unity on a matched steering beam") {
    const ArrayGeometry geom(4, 4);
    const RegionPartition part(2, 2, 2, 2);
    const PolarizationState pol(0.3, 0.02, 0.4, -0.9, 0.7, 0.1);
    const int az_points = 61, el_points = 31;

    // Cell centers of the coverage rectangle.
    const int i = 40, j = 11;
    const double az = -kPi / 2.0 + (i + 0.5) * kPi / az_points;
    const double el = -kPi / 4.0 + (j + 0.5) * (kPi / 2.0) / el_points;

    Codeword cw;
    cw.w = lift_tx(steering_paired(az, el, geom), pol);
    cw.end = LinkEnd::Tx;
    cw.pol = PolLayout::Dual;
    const PatternGrid grid = reference_gain_grid(cw, pol, geom, part, az_points, el_points);
    REQUIRE(grid.gain.rows() == el_points);
    REQUIRE(grid.gain.cols() == az_points);
    CHECK(grid.theta_az[i] == doctest::Approx(az).epsilon(1e-12));
    CHECK(grid.theta_el[j] == doctest::Approx(el).epsilon(1e-12));
    CHECK(grid.gain(j, i) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(grid.gain.maxCoeff() <= 1.0 + 1e-9);
    CHECK(grid.gain.minCoeff() >= 0.0);
    CHECK(grid.ideal_gain == doctest::Approx(ideal_pattern(part, geom, 1, 1).gain));
}

TEST_CASE("flat-error beams keep a higher in-region floor than projection beams") {
    // 8x16 panel, 6x6 regions, default sections; central region.
    const ArrayGeometry geom(8, 16);
    const RegionPartition part(6, 6, 7, 7);
    const DictionarySet dict = build_dictionaries(geom, part);
    const PolarizationState pol(0.3, 0.0, 0.0, 0.0, 0.0, 0.0);
    const int p = 3, q = 3;

    const SeCandidateSet set = SeCandidateSet::phase_ramps(3, part.l_h, part.l_v);
    const Vec w_se = se_select(set, dict, pol, p, q).chosen.w;
    const Vec w_mip = lift_tx(mip_single(dict, p, q), pol);

    const PatternGrid g_se = reference_gain_grid(
        {w_se, Criterion::SE, LinkEnd::Tx, PolLayout::Dual, p, q, std::nullopt}, pol, geom, part,
        181, 91);
    const PatternGrid g_mip = reference_gain_grid(
        {w_mip, Criterion::MIP, LinkEnd::Tx, PolLayout::Dual, p, q, std::nullopt}, pol, geom,
        part, 181, 91);

    const auto [alo, ahi] = part.az_bounds(p);
    const auto [elo, ehi] = part.el_bounds(q);
    double min_se = 2.0, min_mip = 2.0;
    int in_region = 0;
    for (int jj = 0; jj < 91; ++jj) {
        for (int ii = 0; ii < 181; ++ii) {
            const double pa = paired_az_freq(g_se.theta_az[ii], g_se.theta_el[jj]).rad;
            const double pe = paired_el_freq(g_se.theta_el[jj]).rad;
            if (pa >= alo && pa < ahi && pe >= elo && pe < ehi) {
                min_se = std::min(min_se, g_se.gain(jj, ii));
                min_mip = std::min(min_mip, g_mip.gain(jj, ii));
                ++in_region;
            }
        }
    }
    REQUIRE(in_region > 20);
    CHECK(min_se > min_mip);
}

TEST_CASE("pattern runs pick the central region by default") {
    ExperimentConfig cfg = small_config();
    cfg.pattern_az_points = 41;
    cfg.pattern_el_points = 21;
    const PatternOutput out = run_pattern(cfg);
    CHECK(out.p == 1);  // (2+1)/2
    CHECK(out.q == 1);
    REQUIRE(out.grid.gain.rows() == 21);
    REQUIRE(out.grid.gain.cols() == 41);

    std::ostringstream os;
    write_pattern_csv(os, out);
    const std::string text = os.str();
    CHECK(text.find("theta_az,theta_el,gain,gain_db,gain_normalized") != std::string::npos);
    CHECK(text.find("az_points=41") != std::string::npos);

    ExperimentConfig picked = cfg;
    picked.pattern_p = 2;
    picked.pattern_q = 2;
    const PatternOutput out2 = run_pattern(picked);
    CHECK(out2.p == 2);
    CHECK(out2.q == 2);
}

TEST_CASE("design exports one row group per region and serializes deterministically") {
    const ExperimentConfig cfg = small_config();
    const DesignOutput out = run_design(cfg);
    // Per region and end: single + dual + n_rf analog columns + digital.
    const int per_region = 3 + cfg.n_rf;
    const int expect = per_region * (cfg.tx.q_h * cfg.tx.q_v + cfg.rx.q_h * cfg.rx.q_v);
    REQUIRE(int(out.rows.size()) == expect);
    CHECK(out.rows[0].end == LinkEnd::Tx);
    CHECK(out.rows[0].part == "single");
    CHECK(out.rows[1].part == "dual");
    CHECK(out.rows[2].part == "analog1");
    CHECK(out.rows[2 + cfg.n_rf].part == "digital");

    const DesignOutput out2 = run_design(cfg);
    std::ostringstream s1, s2;
    write_codebook_csv(s1, out.metadata, out.rows);
    write_codebook_csv(s2, out2.metadata, out2.rows);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("end,criterion,p,q,part,re0,im0,re1,im1,...") != std::string::npos);
}

TEST_CASE("the self-check suite passes and ignores the thread count") {
    ExperimentConfig cfg;
    cfg.threads = 1;
    std::ostringstream o1;
    CHECK(run_verify(cfg, o1) == 0);
    CHECK(o1.str().find("verify: all checks passed") != std::string::npos);
    CHECK(o1.str().find("FAIL") == std::string::npos);

    ExperimentConfig cfg8;
    cfg8.threads = 8;
    std::ostringstream o8;
    CHECK(run_verify(cfg8, o8) == 0);
    CHECK(o1.str() == o8.str());
}

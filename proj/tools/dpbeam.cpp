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
// Command-line front end. Subcommands:
//   design   emit the designed codebooks as CSV
//   pattern  emit a physical-angle gain grid for one region's codeword
//   rate     run Monte-Carlo trials over the SNR list, emit the rate curve
//   cdf      run trials at the first SNR point, emit the rate CDF
//   verify   run the deterministic invariant suite
//
// Exit codes: 0 success, 1 invariant/acceptance failure, 2 configuration
// error, 3 I/O error.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpbeam/sim.hpp"

namespace {

using dpbeam::ExperimentConfig;

struct CliOverrides {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<double> snr_db;
    std::string criterion;
    int pilot_j = 0;
    int threads = -1;
    std::vector<int> region;

    bool has_out = false;
    bool has_seed = false;
    bool has_trials = false;
    bool has_snr = false;
    bool has_criterion = false;
    bool has_pilot_j = false;
    bool has_threads = false;
};

void add_common_options(CLI::App* sub, CliOverrides* ov, bool with_region) {
    sub->add_option("--config", ov->config_path, "JSON experiment config file");
    sub->add_option("--seed", ov->seed, "master seed (unsigned 64-bit)")
        ->trigger_on_parse()
        ->each([ov](const std::string&) { ov->has_seed = true; });
    sub->add_option("--out", ov->out, "output CSV path (default: stdout)")
        ->each([ov](const std::string&) { ov->has_out = true; });
    sub->add_option("--trials", ov->trials, "Monte-Carlo trial count")
        ->each([ov](const std::string&) { ov->has_trials = true; });
    sub->add_option("--snr-db", ov->snr_db, "comma-separated SNR list in dB")
        ->delimiter(',')
        ->each([ov](const std::string&) { ov->has_snr = true; });
    sub->add_option("--criterion", ov->criterion, "design criterion")
        ->check(CLI::IsMember({"se", "mip", "baseline", "dft-baseline"}))
        ->each([ov](const std::string&) { ov->has_criterion = true; });
    sub->add_option("--pilot-j", ov->pilot_j, "pilot block length J (4J symbols)")
        ->each([ov](const std::string&) { ov->has_pilot_j = true; });
    sub->add_option("--threads", ov->threads, "worker threads (0 = hardware concurrency)")
        ->each([ov](const std::string&) { ov->has_threads = true; });
    if (with_region) {
        sub->add_option("--region", ov->region, "region to sweep: P Q (1-based)")
            ->expected(2);
    }
}

ExperimentConfig make_config(const CliOverrides& ov) {
    ExperimentConfig cfg;
    if (!ov.config_path.empty()) cfg = dpbeam::load_config(ov.config_path);
    if (ov.has_seed) cfg.seed = ov.seed;
    if (ov.has_out) cfg.out = ov.out;
    if (ov.has_trials) cfg.trials = ov.trials;
    if (ov.has_snr) cfg.snr_db = ov.snr_db;
    if (ov.has_criterion) cfg.criterion = dpbeam::criterion_from_string(ov.criterion);
    if (ov.has_pilot_j) cfg.pilot_j = ov.pilot_j;
    if (ov.has_threads) cfg.threads = ov.threads;
    if (ov.region.size() == 2) {
        cfg.pattern_p = ov.region[0];
        cfg.pattern_q = ov.region[1];
    }
    cfg.validate();
    return cfg;
}

void write_to(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dpbeam::io_error("cannot open for writing: " + path);
    body(out);
    out.flush();
    if (!out) throw dpbeam::io_error("write failed: " + path);
}

int cmd_design(const ExperimentConfig& cfg) {
    const dpbeam::DesignOutput d = dpbeam::run_design(cfg);
    write_to(cfg.out, [&](std::ostream& os) { dpbeam::write_codebook_csv(os, d.metadata, d.rows); });
    return 0;
}

int cmd_pattern(const ExperimentConfig& cfg) {
    const dpbeam::PatternOutput p = dpbeam::run_pattern(cfg);
    write_to(cfg.out, [&](std::ostream& os) { dpbeam::write_pattern_csv(os, p); });
    return 0;
}

int cmd_rate(const ExperimentConfig& cfg) {
    const dpbeam::RateOutput r = dpbeam::run_rate(cfg);
    write_to(cfg.out, [&](std::ostream& os) { dpbeam::write_rate_csv(os, r.metadata, r.curve); });
    if (!cfg.out.empty()) {
        std::cout << "snr_db,mean_rate,stderr,trials\n";
        for (const dpbeam::RatePoint& pt : r.curve.points) {
            std::cout << dpbeam::csv_number(pt.snr_db) << "," << dpbeam::csv_number(pt.mean_rate)
                      << "," << dpbeam::csv_number(pt.stderr_rate) << "," << pt.trials << "\n";
        }
    }
    if (!r.violations.empty()) {
        for (const std::string& v : r.violations) std::cerr << "invariant violation: " << v << "\n";
        return 1;
    }
    return 0;
}

int cmd_cdf(const ExperimentConfig& cfg) {
    const dpbeam::CdfOutput c = dpbeam::run_cdf(cfg);
    write_to(cfg.out, [&](std::ostream& os) { dpbeam::write_cdf_csv(os, c); });
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    if (cfg.out.empty()) return dpbeam::run_verify(cfg, std::cout);
    int rc = 1;
    write_to(cfg.out, [&](std::ostream& os) { rc = dpbeam::run_verify(cfg, os); });
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-polarized hybrid beamforming codebooks and link simulation"};
    app.require_subcommand(1);

    CliOverrides ov;
    CLI::App* design = app.add_subcommand("design", "emit the designed codebooks as CSV");
    CLI::App* pattern =
        app.add_subcommand("pattern", "emit a physical-angle gain grid for one region");
    CLI::App* rate = app.add_subcommand("rate", "emit the Monte-Carlo rate curve as CSV");
    CLI::App* cdf = app.add_subcommand("cdf", "emit the per-trial rate CDF as CSV");
    CLI::App* verify = app.add_subcommand("verify", "run the deterministic invariant suite");
    add_common_options(design, &ov, false);
    add_common_options(pattern, &ov, true);
    add_common_options(rate, &ov, false);
    add_common_options(cdf, &ov, false);
    add_common_options(verify, &ov, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad flags are configuration errors
    }

    try {
        const ExperimentConfig cfg = make_config(ov);
        if (design->parsed()) return cmd_design(cfg);
        if (pattern->parsed()) return cmd_pattern(cfg);
        if (rate->parsed()) return cmd_rate(cfg);
        if (cdf->parsed()) return cmd_cdf(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const dpbeam::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dpbeam::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

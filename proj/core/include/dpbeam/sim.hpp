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

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "dpbeam/array.hpp"
#include "dpbeam/channel.hpp"
#include "dpbeam/codebook.hpp"
#include "dpbeam/codebook_csv.hpp"
#include "dpbeam/hybrid.hpp"
#include "dpbeam/polarization.hpp"
#include "dpbeam/protocol.hpp"
#include "dpbeam/types.hpp"

namespace dpbeam {

double db_to_linear(double db);
double linear_to_db(double linear);

// One link end: panel dimensions, region partition, sections per region.
struct EndConfig {
    int m_h = 8;
    int m_v = 8;
    int q_h = 6;
    int q_v = 6;
    int l_h = 7;
    int l_v = 7;

    ArrayGeometry geometry() const { return ArrayGeometry(m_h, m_v, true); }
    RegionPartition partition() const { return RegionPartition(q_h, q_v, l_h, l_v); }
};

// Complete experiment description. Loadable from a JSON file (see
// load_config); every field has the documented default below.
struct ExperimentConfig {
    EndConfig tx;
    EndConfig rx;
    int n_rf = 4;
    std::optional<int> phase_bits = 4;
    ChannelConfig channel;
    Criterion criterion = Criterion::SE;
    int pilot_j = 1;
    std::vector<double> snr_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    int trials = 1000;
    std::uint64_t seed = 1;
    int candidate_b = 3;  // phase-ramp levels per axis in the SE candidate set
    int threads = 0;      // 0 = hardware concurrency
    std::string out;      // output CSV path ("" = stdout)

    // `pattern` subcommand knobs: which region to sweep and the grid size.
    int pattern_p = 0;  // 0 = central region (q_h + 1) / 2
    int pattern_q = 0;
    int pattern_az_points = 181;
    int pattern_el_points = 91;

    void validate() const;  // throws config_error with a field-precise message
};

// Parses a JSON config (comments allowed). Unknown keys are rejected;
// messages carry the offending key or the line of the syntax error.
ExperimentConfig parse_config_json(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);  // io_error / config_error

// Config echo for CSV headers. Never includes `threads` or `out`, so that
// outputs stay byte-identical when only those differ.
CsvMetadata experiment_metadata(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------
// Design artifacts shared by all trials (immutable after setup).
// ---------------------------------------------------------------------

struct DesignArtifacts {
    ArrayGeometry tx_geom;
    ArrayGeometry rx_geom;
    RegionPartition tx_part;
    RegionPartition rx_part;
    DictionarySet tx_dict;
    DictionarySet rx_dict;
    PolarizationState design_pol;  // mean chi / mean phi, reference phases
    Codebook tx_single;            // designed single-polarization words
    Codebook rx_single;
    Codebook tx_align;  // dual-polarization alignment (or baseline) words
    Codebook rx_align;
    Codebook tx_export;  // implementable dual words with hybrid factors
    Codebook rx_export;
    PilotSchedule pilots;

    bool uses_pilots() const { return !tx_single.words.empty() && tx_single.words[0].criterion != Criterion::Baseline; }
};

DesignArtifacts design_codebooks(const ExperimentConfig& cfg);

// Baseline comparison book ("dft-baseline" in outputs): per region, the
// region-center steering vector; transmit side stacked with a fixed unit
// phase ratio, receive side duplicated across polarizations.
Codebook baseline_single_codebook(const ArrayGeometry& geom, const RegionPartition& part,
                                  LinkEnd end);
Codebook baseline_codebook(const ArrayGeometry& geom, const RegionPartition& part,
                           const PolarizationState& design_pol, LinkEnd end);

// ---------------------------------------------------------------------
// Monte-Carlo trials
// ---------------------------------------------------------------------

struct TrialOutput {
    double rate = 0.0;            // finalized-pair rate (or fallback)
    double rate_alignment = 0.0;  // aligned-pair rate before finalization
    AlignmentResult alignment;
    cxd ratio_tx{1.0, 0.0};
    cxd ratio_rx{1.0, 0.0};
    bool estimated = false;  // false = baseline path or estimation fallback
};

// One realization: sample channel -> beam alignment -> pilot estimation ->
// finalized codewords -> rate. Sub-seeds are derived from trial_seed, so the
// same trial_seed reproduces the trial exactly at any SNR list position.
TrialOutput data_rate_trial(const DesignArtifacts& art, const ExperimentConfig& cfg,
                            double snr_linear, std::uint64_t trial_seed);

struct TrialBatch {
    std::vector<double> rates;        // rates[i] from trial seed mix_seed(master, i)
    std::vector<double> align_rates;  // aligned-pair rates, same trials
    int estimation_failures = 0;

    double mean_rate() const;
    double stderr_rate() const;
};

TrialBatch run_trials(const DesignArtifacts& art, const ExperimentConfig& cfg, double snr_db,
                      int trials);

struct RatePoint {
    double snr_db = 0.0;
    double mean_rate = 0.0;
    double stderr_rate = 0.0;
    int trials = 0;
};

struct RateCurve {
    std::vector<RatePoint> points;

    // Nonnegative means; non-decreasing in SNR within 3 pooled standard
    // errors; in pure-LOS mode, mean rate at or below the flat in-region
    // bound log2(1 + snr * 2 * Q_tx * Q_rx) + 1e-6. Returns human-readable
    // violation messages (empty = all invariants hold).
    std::vector<std::string> violations(const ExperimentConfig& cfg) const;
};

struct RateOutput {
    RateCurve curve;
    CsvMetadata metadata;
    std::vector<std::string> violations;
};

RateOutput run_rate(const ExperimentConfig& cfg);
void write_rate_csv(std::ostream& os, const CsvMetadata& metadata, const RateCurve& curve);

struct CdfOutput {
    double snr_db = 0.0;            // first entry of cfg.snr_db
    std::vector<double> rates;      // ascending; cdf value for rates[i] is (i+1)/n
    CsvMetadata metadata;
};

CdfOutput run_cdf(const ExperimentConfig& cfg);
void write_cdf_csv(std::ostream& os, const CdfOutput& cdf);

// ---------------------------------------------------------------------
// Reference-gain grids (physical-angle beam patterns)
// ---------------------------------------------------------------------

struct PatternGrid {
    RVec theta_az;     // az_points values in (-pi/2, pi/2)
    RVec theta_el;     // el_points values in (-pi/4, pi/4)
    RMat gain;         // el_points x az_points, in [0, 1]
    double ideal_gain = 0.0;  // flat in-region level used for normalization
};

// Reference gain of a dual-polarization codeword over a paired-angle grid
// (grid points at cell centers of the open coverage rectangle).
PatternGrid reference_gain_grid(const Codeword& w, const PolarizationState& pol,
                                const ArrayGeometry& geom, const RegionPartition& part,
                                int az_points, int el_points);

// Responses of single-panel steering vectors at the given spatial
// frequencies against a folded single-panel vector: entry (j, i) is
// (d(az_i) (x) d(el_j))^H fold. Gains are the squared magnitudes.
Mat steering_response_grid(const Vec& fold, const ArrayGeometry& geom, const RVec& psi_az,
                           const RVec& psi_el);

struct PatternOutput {
    PatternGrid grid;
    CsvMetadata metadata;
    int p = 1;
    int q = 1;
};

// Sweeps the transmit-side exported codeword of the configured region.
PatternOutput run_pattern(const ExperimentConfig& cfg);
void write_pattern_csv(std::ostream& os, const PatternOutput& out);

// ---------------------------------------------------------------------
// Invariant suite ("verify" subcommand)
// ---------------------------------------------------------------------

// Runs the deterministic invariant suite on fixed desk-scale
// configurations, seeded from cfg.seed. Prints one line per check
// ("ok -- name" / "FAIL -- name: detail"); returns 0 when every check
// passes, 1 otherwise. Output is independent of cfg.threads.
int run_verify(const ExperimentConfig& cfg, std::ostream& os);

// ---------------------------------------------------------------------
// Deterministic parallel loop: indices 0..n-1 are claimed from an atomic
// counter by `threads` workers; the body must write results by index.
// Exceptions are captured and rethrown after all workers join.
// ---------------------------------------------------------------------

template <typename F>
void parallel_for(int n, int threads, F&& body) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
    if (threads > n) threads = n < 1 ? 1 : n;
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------
// Design export ("design" subcommand)
// ---------------------------------------------------------------------

struct DesignOutput {
    CsvMetadata metadata;
    std::vector<CodebookCsvRow> rows;
};

DesignOutput run_design(const ExperimentConfig& cfg);
DesignOutput run_design(const ExperimentConfig& cfg, const DesignArtifacts& art);

}  // namespace dpbeam

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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dpbeam/sim.hpp"

namespace dpbeam {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw config_error(origin + ": " + msg);
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& origin, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end()) {
            fail(origin, "unknown key \"" + path + it.key() + "\"");
        }
    }
}

int get_int(const json& obj, const char* key, int fallback, const std::string& origin,
            const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(origin, "\"" + path + key + "\" must be an integer");
    return v.get<int>();
}

double get_double(const json& obj, const char* key, double fallback, const std::string& origin,
                  const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(origin, "\"" + path + key + "\" must be a number");
    return v.get<double>();
}

std::pair<double, double> get_range(const json& obj, const char* key, double lo, double hi,
                                    const std::string& origin, const std::string& path) {
    if (!obj.contains(key)) return {lo, hi};
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(origin, "\"" + path + key + "\" must be a two-element numeric array [lo, hi]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

EndConfig parse_end(const json& obj, const EndConfig& defaults, const std::string& origin,
                    const std::string& path) {
    if (!obj.is_object()) fail(origin, "\"" + path + "\" must be an object");
    reject_unknown_keys(obj, {"m_h", "m_v", "q_h", "q_v", "l_h", "l_v"}, origin, path + ".");
    EndConfig e = defaults;
    e.m_h = get_int(obj, "m_h", e.m_h, origin, path + ".");
    e.m_v = get_int(obj, "m_v", e.m_v, origin, path + ".");
    e.q_h = get_int(obj, "q_h", e.q_h, origin, path + ".");
    e.q_v = get_int(obj, "q_v", e.q_v, origin, path + ".");
    e.l_h = get_int(obj, "l_h", e.l_h, origin, path + ".");
    e.l_v = get_int(obj, "l_v", e.l_v, origin, path + ".");
    return e;
}

void check_positive(int value, const char* name) {
    if (value < 1) throw config_error(std::string(name) + " must be a positive integer");
}

}  // namespace

void ExperimentConfig::validate() const {
    check_positive(tx.m_h, "tx.m_h");
    check_positive(tx.m_v, "tx.m_v");
    check_positive(tx.q_h, "tx.q_h");
    check_positive(tx.q_v, "tx.q_v");
    check_positive(tx.l_h, "tx.l_h");
    check_positive(tx.l_v, "tx.l_v");
    check_positive(rx.m_h, "rx.m_h");
    check_positive(rx.m_v, "rx.m_v");
    check_positive(rx.q_h, "rx.q_h");
    check_positive(rx.q_v, "rx.q_v");
    check_positive(rx.l_h, "rx.l_h");
    check_positive(rx.l_v, "rx.l_v");
    check_positive(n_rf, "n_rf");
    if (phase_bits && (*phase_bits < 1 || *phase_bits > 62)) {
        throw config_error("phase_bits must lie in [1, 62] when set");
    }
    channel.validate();
    if (criterion == Criterion::Alignment) {
        throw config_error("criterion must be one of se, mip, baseline");
    }
    check_positive(pilot_j, "pilot_j");
    if (snr_db.empty()) throw config_error("snr_db must be a non-empty list");
    for (double s : snr_db) {
        if (!std::isfinite(s)) throw config_error("snr_db entries must be finite");
    }
    check_positive(trials, "trials");
    check_positive(candidate_b, "candidate_b");
    if (threads < 0) throw config_error("threads must be >= 0 (0 = hardware concurrency)");
    if (pattern_p < 0 || pattern_p > tx.q_h) {
        throw config_error("pattern.p out of range for the transmit partition");
    }
    if (pattern_q < 0 || pattern_q > tx.q_v) {
        throw config_error("pattern.q out of range for the transmit partition");
    }
    if (pattern_az_points < 1 || pattern_el_points < 1) {
        throw config_error("pattern grid must have at least one point per axis");
    }
}

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        const size_t byte = e.byte > text.size() ? text.size() : e.byte;
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n');
        fail(origin, "JSON syntax error at line " + std::to_string(line) + ": " + e.what());
    }
    if (!root.is_object()) fail(origin, "config root must be a JSON object");
    reject_unknown_keys(root,
                        {"tx", "rx", "n_rf", "phase_bits", "channel", "criterion", "pilot_j",
                         "snr_db", "trials", "seed", "candidate_b", "threads", "out", "pattern"},
                        origin, "");

    ExperimentConfig cfg;
    if (root.contains("tx")) cfg.tx = parse_end(root.at("tx"), cfg.tx, origin, "tx");
    if (root.contains("rx")) cfg.rx = parse_end(root.at("rx"), cfg.rx, origin, "rx");
    cfg.n_rf = get_int(root, "n_rf", cfg.n_rf, origin, "");
    if (root.contains("phase_bits")) {
        const json& v = root.at("phase_bits");
        if (v.is_null()) {
            cfg.phase_bits.reset();
        } else if (v.is_number_integer()) {
            cfg.phase_bits = v.get<int>();
        } else {
            fail(origin, "\"phase_bits\" must be an integer or null");
        }
    }
    if (root.contains("channel")) {
        const json& ch = root.at("channel");
        if (!ch.is_object()) fail(origin, "\"channel\" must be an object");
        reject_unknown_keys(ch, {"k_db", "n_nlos", "chi", "phi"}, origin, "channel.");
        cfg.channel.k_db = get_double(ch, "k_db", cfg.channel.k_db, origin, "channel.");
        cfg.channel.n_nlos = get_int(ch, "n_nlos", cfg.channel.n_nlos, origin, "channel.");
        std::tie(cfg.channel.chi_min, cfg.channel.chi_max) =
            get_range(ch, "chi", cfg.channel.chi_min, cfg.channel.chi_max, origin, "channel.");
        std::tie(cfg.channel.phi_min, cfg.channel.phi_max) =
            get_range(ch, "phi", cfg.channel.phi_min, cfg.channel.phi_max, origin, "channel.");
    }
    if (root.contains("criterion")) {
        const json& v = root.at("criterion");
        if (!v.is_string()) fail(origin, "\"criterion\" must be a string");
        cfg.criterion = criterion_from_string(v.get<std::string>());
    }
    cfg.pilot_j = get_int(root, "pilot_j", cfg.pilot_j, origin, "");
    if (root.contains("snr_db")) {
        const json& v = root.at("snr_db");
        if (!v.is_array() || v.empty()) fail(origin, "\"snr_db\" must be a non-empty array");
        cfg.snr_db.clear();
        for (const json& s : v) {
            if (!s.is_number()) fail(origin, "\"snr_db\" entries must be numbers");
            cfg.snr_db.push_back(s.get<double>());
        }
    }
    cfg.trials = get_int(root, "trials", cfg.trials, origin, "");
    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (v.is_number_unsigned()) {
            cfg.seed = v.get<std::uint64_t>();
        } else if (v.is_number_integer() && v.get<long long>() >= 0) {
            cfg.seed = static_cast<std::uint64_t>(v.get<long long>());
        } else {
            fail(origin, "\"seed\" must be a nonnegative integer");
        }
    }
    cfg.candidate_b = get_int(root, "candidate_b", cfg.candidate_b, origin, "");
    cfg.threads = get_int(root, "threads", cfg.threads, origin, "");
    if (root.contains("out")) {
        const json& v = root.at("out");
        if (!v.is_string()) fail(origin, "\"out\" must be a string");
        cfg.out = v.get<std::string>();
    }
    if (root.contains("pattern")) {
        const json& p = root.at("pattern");
        if (!p.is_object()) fail(origin, "\"pattern\" must be an object");
        reject_unknown_keys(p, {"p", "q", "az_points", "el_points"}, origin, "pattern.");
        cfg.pattern_p = get_int(p, "p", cfg.pattern_p, origin, "pattern.");
        cfg.pattern_q = get_int(p, "q", cfg.pattern_q, origin, "pattern.");
        cfg.pattern_az_points = get_int(p, "az_points", cfg.pattern_az_points, origin, "pattern.");
        cfg.pattern_el_points = get_int(p, "el_points", cfg.pattern_el_points, origin, "pattern.");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failed: " + path);
    return parse_config_json(ss.str(), path);
}

CsvMetadata experiment_metadata(const ExperimentConfig& cfg) {
    auto dims = [](int a, int b) { return std::to_string(a) + "x" + std::to_string(b); };
    CsvMetadata m;
    m.emplace_back("format", "dpbeam-csv-1");
    m.emplace_back("criterion", to_string(cfg.criterion));
    m.emplace_back("tx_panel", dims(cfg.tx.m_h, cfg.tx.m_v));
    m.emplace_back("tx_regions", dims(cfg.tx.q_h, cfg.tx.q_v));
    m.emplace_back("tx_sections", dims(cfg.tx.l_h, cfg.tx.l_v));
    m.emplace_back("rx_panel", dims(cfg.rx.m_h, cfg.rx.m_v));
    m.emplace_back("rx_regions", dims(cfg.rx.q_h, cfg.rx.q_v));
    m.emplace_back("rx_sections", dims(cfg.rx.l_h, cfg.rx.l_v));
    m.emplace_back("n_rf", std::to_string(cfg.n_rf));
    m.emplace_back("phase_bits", cfg.phase_bits ? std::to_string(*cfg.phase_bits) : "none");
    m.emplace_back("k_db", csv_number(cfg.channel.k_db));
    m.emplace_back("n_nlos", std::to_string(cfg.channel.n_nlos));
    m.emplace_back("chi", csv_number(cfg.channel.chi_min) + ":" + csv_number(cfg.channel.chi_max));
    m.emplace_back("phi", csv_number(cfg.channel.phi_min) + ":" + csv_number(cfg.channel.phi_max));
    m.emplace_back("pilot_j", std::to_string(cfg.pilot_j));
    m.emplace_back("candidate_b", std::to_string(cfg.candidate_b));
    m.emplace_back("trials", std::to_string(cfg.trials));
    m.emplace_back("seed", std::to_string(cfg.seed));
    std::string snr;
    for (size_t i = 0; i < cfg.snr_db.size(); ++i) {
        if (i) snr += ";";
        snr += csv_number(cfg.snr_db[i]);
    }
    m.emplace_back("snr_db", snr);
    return m;
}

}  // namespace dpbeam

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

#include "dpbeam/array.hpp"

#include <cmath>
#include <numbers>

namespace dpbeam {

namespace {
constexpr double kPi = std::numbers::pi;

void check_region_indices(const RegionPartition& part, int p, int q) {
    if (p < 1 || p > part.q_h || q < 1 || q > part.q_v) {
        throw std::out_of_range("region index (" + std::to_string(p) + ", " + std::to_string(q) +
                                ") outside partition " + std::to_string(part.q_h) + " x " +
                                std::to_string(part.q_v));
    }
}
}  // namespace

ArrayGeometry::ArrayGeometry(int mh, int mv, bool dual) : m_h(mh), m_v(mv), dual_pol(dual) {
    if (mh < 1 || mv < 1) {
        throw config_error("array geometry requires m_h >= 1 and m_v >= 1, got " +
                           std::to_string(mh) + " x " + std::to_string(mv));
    }
}

RegionPartition::RegionPartition(int qh, int qv, int lh, int lv)
    : q_h(qh), q_v(qv), l_h(lh), l_v(lv) {
    if (qh < 1 || qv < 1 || lh < 1 || lv < 1) {
        throw config_error("region partition requires positive q_h, q_v, l_h, l_v");
    }
}

std::pair<double, double> RegionPartition::az_bounds(int p) const {
    check_region_indices(*this, p, 1);
    const double width = 2.0 * kPi / q_h;
    const double lo = -kPi + width * (p - 1);
    return {lo, lo + width};
}

std::pair<double, double> RegionPartition::el_bounds(int q) const {
    check_region_indices(*this, 1, q);
    const double span = kPi / kElevationCompression;  // half-extent of coverage
    const double width = 2.0 * kPi / (kElevationCompression * q_v);
    const double lo = -span + width * (q - 1);
    return {lo, lo + width};
}

SpatialFreq RegionPartition::az_section_center(int k) const {
    const int n = q_h * l_h;
    if (k < 0 || k >= n) throw std::out_of_range("azimuth section index out of range");
    return SpatialFreq(-kPi + kPi / n + 2.0 * kPi * k / n);
}

SpatialFreq RegionPartition::el_section_center(int k) const {
    const int n = q_v * l_v;
    if (k < 0 || k >= n) throw std::out_of_range("elevation section index out of range");
    const double span = kPi / kElevationCompression;
    return SpatialFreq(-span + span / n + 2.0 * span * k / n);
}

SpatialFreq RegionPartition::az_region_center(int p) const {
    const auto [lo, hi] = az_bounds(p);
    return SpatialFreq(0.5 * (lo + hi));
}

SpatialFreq RegionPartition::el_region_center(int q) const {
    const auto [lo, hi] = el_bounds(q);
    return SpatialFreq(0.5 * (lo + hi));
}

std::pair<int, int> RegionPartition::region_of_section(int flat) const {
    if (flat < 0 || flat >= section_count()) {
        throw std::out_of_range("dictionary column index out of range");
    }
    const int k_h = flat / (q_v * l_v);
    const int k_v = flat % (q_v * l_v);
    return {k_h / l_h + 1, k_v / l_v + 1};
}

std::vector<int> RegionPartition::region_section_indices(int p, int q) const {
    check_region_indices(*this, p, q);
    std::vector<int> idx;
    idx.reserve(sections_per_region());
    for (int sh = 0; sh < l_h; ++sh) {
        const int k_h = (p - 1) * l_h + sh;
        for (int sv = 0; sv < l_v; ++sv) {
            const int k_v = (q - 1) * l_v + sv;
            idx.push_back(section_flat_index(k_h, k_v));
        }
    }
    return idx;
}

Vec steering_unpaired(SpatialFreq psi, int m) {
    if (m < 1) throw config_error("steering vector length must be positive");
    Vec v(m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int k = 0; k < m; ++k) {
        v(k) = std::polar(scale, psi.rad * k);
    }
    return v;
}

SpatialFreq paired_az_freq(double theta_az, double theta_el) {
    return SpatialFreq(kPi * std::sin(theta_az) * std::cos(theta_el));
}

SpatialFreq paired_el_freq(double theta_el) { return SpatialFreq(kPi * std::sin(theta_el)); }

Vec steering_panel(SpatialFreq az, SpatialFreq el, const ArrayGeometry& geom) {
    return kron(steering_unpaired(az, geom.m_h), steering_unpaired(el, geom.m_v));
}

Vec steering_paired(double theta_az, double theta_el, const ArrayGeometry& geom) {
    return steering_panel(paired_az_freq(theta_az, theta_el), paired_el_freq(theta_el), geom);
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

DictionarySet build_dictionaries(const ArrayGeometry& geom, const RegionPartition& part) {
    DictionarySet set;
    set.geom = geom;
    set.part = part;
    const int n_h = part.q_h * part.l_h;
    const int n_v = part.q_v * part.l_v;
    set.d_h.resize(geom.m_h, n_h);
    for (int k = 0; k < n_h; ++k) {
        set.d_h.col(k) = steering_unpaired(part.az_section_center(k), geom.m_h);
    }
    set.d_v.resize(geom.m_v, n_v);
    for (int k = 0; k < n_v; ++k) {
        set.d_v.col(k) = steering_unpaired(part.el_section_center(k), geom.m_v);
    }
    set.d = kron(set.d_h, set.d_v);
    return set;
}

Mat DictionarySet::d_h_block(int p) const {
    check_region_indices(part, p, 1);
    return d_h.middleCols(static_cast<Eigen::Index>(p - 1) * part.l_h, part.l_h);
}

Mat DictionarySet::d_v_block(int q) const {
    check_region_indices(part, 1, q);
    return d_v.middleCols(static_cast<Eigen::Index>(q - 1) * part.l_v, part.l_v);
}

Mat DictionarySet::d_block(int p, int q) const { return kron(d_h_block(p), d_v_block(q)); }

Vec region_transform(const Vec& c_single, int p, int q, const ArrayGeometry& geom,
                     const RegionPartition& part) {
    check_region_indices(part, p, q);
    if (c_single.size() != geom.panel_size()) {
        throw std::invalid_argument("region_transform expects a single-polarization panel vector");
    }
    const double d_az = 2.0 * kPi * (p - 1) / part.q_h;
    const double d_el = 2.0 * kPi * (q - 1) / (kElevationCompression * part.q_v);
    Vec out(c_single.size());
    for (int ih = 0; ih < geom.m_h; ++ih) {
        for (int iv = 0; iv < geom.m_v; ++iv) {
            const int idx = ih * geom.m_v + iv;
            out(idx) = c_single(idx) * std::polar(1.0, d_az * ih + d_el * iv);
        }
    }
    return out;
}

}  // namespace dpbeam

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
// Uniform planar array geometry, steering vectors, the spatial-frequency
// region partition, the section-center dictionaries the codebook design is
// indexed by, and the phase-ramp transform that translates a beamformer
// designed for the first region to any other region.
//
// Conventions used throughout the library:
//  * half-wavelength element spacing on both axes;
//  * a panel weight vector is the Kronecker product (horizontal) x (vertical),
//    so the vertical element index varies fastest: w[ih*m_v + iv];
//  * dual-polarized arrays stack the two polarization ports blockwise,
//    [vertical-port block; horizontal-port block], each block one panel;
//  * azimuth spatial frequencies cover [-pi, pi), elevation spatial
//    frequencies cover [-pi/sqrt(2), pi/sqrt(2)).

#ifndef DPBEAM_ARRAY_HPP
#define DPBEAM_ARRAY_HPP

#include <utility>
#include <vector>

#include "dpbeam/types.hpp"

namespace dpbeam {

// Elevation coverage is the azimuth coverage compressed by sqrt(2).
inline constexpr double kElevationCompression = 1.4142135623730951;  // sqrt(2)

// One end of the link: an m_h x m_v panel, optionally duplicated across two
// polarization ports.
struct ArrayGeometry {
    int m_h = 1;          // horizontal elements per panel
    int m_v = 1;          // vertical elements per panel
    bool dual_pol = true; // two stacked polarization ports when true

    ArrayGeometry() = default;
    ArrayGeometry(int mh, int mv, bool dual = true);

    int panel_size() const { return m_h * m_v; }
    int port_count() const { return dual_pol ? 2 * panel_size() : panel_size(); }
};

// Partition of the spatial-frequency rectangle into q_h x q_v regions, each
// subdivided into l_h x l_v dictionary sections per axis.
struct RegionPartition {
    int q_h = 1;
    int q_v = 1;
    int l_h = 1;
    int l_v = 1;

    RegionPartition() = default;
    RegionPartition(int qh, int qv, int lh, int lv);

    int region_count() const { return q_h * q_v; }
    int sections_per_region() const { return l_h * l_v; }
    int section_count() const { return region_count() * sections_per_region(); }

    // Half-open azimuth bounds [lo, hi) of region column p (1-based).
    std::pair<double, double> az_bounds(int p) const;
    // Half-open elevation bounds [lo, hi) of region row q (1-based).
    std::pair<double, double> el_bounds(int q) const;

    // Center spatial frequency of azimuth dictionary section k (0-based,
    // k in [0, q_h*l_h)) / elevation section k (k in [0, q_v*l_v)).
    SpatialFreq az_section_center(int k) const;
    SpatialFreq el_section_center(int k) const;

    // Center of region (p, q), 1-based.
    SpatialFreq az_region_center(int p) const;
    SpatialFreq el_region_center(int q) const;

    // Flat index of the dictionary column for (azimuth section, elevation
    // section); vertical section index varies fastest, matching D_h (x) D_v.
    int section_flat_index(int k_h, int k_v) const { return k_h * (q_v * l_v) + k_v; }

    // Region (p, q), 1-based, that owns flat dictionary column `flat`.
    std::pair<int, int> region_of_section(int flat) const;

    // All flat dictionary-column indices whose section centers lie in region
    // (p, q); ascending order.
    std::vector<int> region_section_indices(int p, int q) const;

    // 0-based flat region index for (p, q), row-major in p then q.
    int region_flat_index(int p, int q) const { return (p - 1) * q_v + (q - 1); }
};

// Uniform linear steering vector at spatial frequency psi:
// entry k = exp(j*psi*k)/sqrt(m), k = 0..m-1.
Vec steering_unpaired(SpatialFreq psi, int m);

// Physical-angle panel steering vector: horizontal phase progression
// pi*sin(az)*cos(el), vertical pi*sin(el), assembled horizontal (x) vertical.
Vec steering_paired(double theta_az, double theta_el, const ArrayGeometry& geom);

// Spatial frequencies induced by a physical direction at half-wavelength
// spacing.
SpatialFreq paired_az_freq(double theta_az, double theta_el);
SpatialFreq paired_el_freq(double theta_el);

// Panel steering vector at independently chosen axis frequencies.
Vec steering_panel(SpatialFreq az, SpatialFreq el, const ArrayGeometry& geom);

// Section-center steering dictionaries for one link end.
//   d_h : m_h x (q_h*l_h), columns at ascending azimuth section centers
//   d_v : m_v x (q_v*l_v), columns at ascending elevation section centers
//   d   : (m_h*m_v) x (q_h*l_h*q_v*l_v) = d_h (x) d_v
struct DictionarySet {
    Mat d_h;
    Mat d_v;
    Mat d;
    ArrayGeometry geom;
    RegionPartition part;

    // Columns of d_h belonging to region column p (1-based): m_h x l_h.
    Mat d_h_block(int p) const;
    // Columns of d_v belonging to region row q (1-based): m_v x l_v.
    Mat d_v_block(int q) const;
    // Kronecker of the two blocks: (m_h*m_v) x (l_h*l_v).
    Mat d_block(int p, int q) const;
};

// Build the dictionaries for `geom`'s single-polarization panel.
DictionarySet build_dictionaries(const ArrayGeometry& geom, const RegionPartition& part);

// Translate a single-polarization unit beamformer designed for region (1,1)
// to region (p, q) by element-wise multiplication with the unit-modulus phase
// ramp at the inter-region frequency offsets. Norm is preserved exactly;
// (p, q) = (1, 1) is the identity.
Vec region_transform(const Vec& c_single, int p, int q, const ArrayGeometry& geom,
                     const RegionPartition& part);

// Kronecker product helper (row/column layout as used above).
Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);

}  // namespace dpbeam

#endif  // DPBEAM_ARRAY_HPP

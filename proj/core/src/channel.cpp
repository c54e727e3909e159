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

#include "dpbeam/channel.hpp"

#include <cmath>
#include <numbers>

#include "dpbeam/polarization.hpp"

namespace dpbeam {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PolarizationState::PolarizationState(double chi_, double phi_, double zvv, double zvh, double zhv,
                                     double zhh)
    : chi(chi_), phi(phi_), zeta_vv(zvv), zeta_vh(zvh), zeta_hv(zhv), zeta_hh(zhh) {
    if (!(chi >= 0.0 && chi <= 1.0)) {
        throw config_error("cross-polarization leakage chi must lie in [0, 1], got " +
                           std::to_string(chi));
    }
    if (!std::isfinite(phi)) {
        throw config_error("rotation angle phi must be finite");
    }
    // |rho_vv|^2 + |rho_vh|^2 = 1/(1+chi) + chi/(1+chi) = 1 identically.
    const double sum = std::norm(rho_vv()) + std::norm(rho_vh());
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::logic_error("polarization coefficient normalization violated");
    }
}

cxd PolarizationState::rho_vv() const {
    return std::polar(std::sqrt(1.0 / (1.0 + chi)), zeta_vv);
}
cxd PolarizationState::rho_vh() const {
    return std::polar(std::sqrt(chi / (1.0 + chi)), zeta_vh);
}
cxd PolarizationState::rho_hv() const {
    return std::polar(std::sqrt(chi / (1.0 + chi)), zeta_hv);
}
cxd PolarizationState::rho_hh() const {
    return std::polar(std::sqrt(1.0 / (1.0 + chi)), zeta_hh);
}

cxd PolarizationState::xi_h() const {
    return rho_vv() * std::conj(rho_hv()) + rho_vh() * std::conj(rho_hh());
}

double PolarizationState::b_rx() const {
    const double s = xi_v() * xi_v() + std::norm(xi_h());
    return 1.0 / std::sqrt(s);
}

cxd PolarizationState::tx_phase_ratio() const { return std::polar(1.0, zeta_vv - zeta_vh); }

cxd PolarizationState::rx_ratio() const {
    const cxd xh = xi_h();
    if (std::abs(xh) == 0.0) {
        throw estimation_error("receive-side ratio undefined: xi_h is zero");
    }
    return cxd(xi_v(), 0.0) / xh;
}

RMat rotation_matrix(double phi, int half_dim) {
    if (half_dim < 1) throw config_error("rotation_matrix requires a positive block size");
    RMat r = RMat::Zero(2 * half_dim, 2 * half_dim);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    for (int i = 0; i < half_dim; ++i) {
        r(i, i) = c;
        r(i, half_dim + i) = -s;
        r(half_dim + i, i) = s;
        r(half_dim + i, half_dim + i) = c;
    }
    return r;
}

double ChannelConfig::k_linear() const { return std::pow(10.0, k_db / 10.0); }

void ChannelConfig::validate() const {
    if (!std::isfinite(k_db)) throw config_error("channel.k_db must be finite");
    if (k_linear() < 0.0) throw config_error("Rician factor must be non-negative");
    if (n_nlos < 0) throw config_error("channel.n_nlos must be >= 0");
    if (!(chi_min <= chi_max) || chi_min < 0.0 || chi_max > 1.0) {
        throw config_error("channel.chi range must satisfy 0 <= chi_min <= chi_max <= 1");
    }
    if (!(phi_min <= phi_max)) throw config_error("channel.phi range is empty");
    if (!(az_min < az_max) || !(el_min < el_max)) {
        throw config_error("channel angular coverage is empty");
    }
}

namespace {
// 2x2 rotation block; the full rotation operator factors as rot2 (x) I, so
// right-multiplying a Kronecker product by it only touches the 2x2 factor:
// (pol2 (x) outer) * (rot2 (x) I) = (pol2 * rot2) (x) outer.
Eigen::Matrix2d rotation_block(double phi) {
    Eigen::Matrix2d r;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    r << c, -s, s, c;
    return r;
}
}  // namespace

Mat path_component(const PolarizationState& pol, cxd gain, double aod_az, double aod_el,
                   double aoa_az, double aoa_el, const ArrayGeometry& tx_geom,
                   const ArrayGeometry& rx_geom) {
    const Vec a_tx = steering_paired(aod_az, aod_el, tx_geom);
    const Vec a_rx = steering_paired(aoa_az, aoa_el, rx_geom);
    Mat outer = a_rx * a_tx.adjoint();  // panel_rx x panel_tx

    Mat pol2(2, 2);
    pol2(0, 0) = pol.rho_vv();
    pol2(0, 1) = pol.rho_vh();
    pol2(1, 0) = pol.rho_hv();
    pol2(1, 1) = pol.rho_hh();
    pol2 = pol2 * rotation_block(pol.phi).cast<cxd>();

    return gain * kron(pol2, outer);
}

Mat tx_side_los(const PolarizationState& pol, cxd h0, double aod_az, double aod_el, double aoa_az,
                double aoa_el, const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom) {
    const Vec d_tx = steering_paired(aod_az, aod_el, tx_geom);
    const Vec d_rx = steering_paired(aoa_az, aoa_el, rx_geom);
    Mat row(1, 2);
    row(0, 0) = pol.rho_vv();
    row(0, 1) = pol.rho_vh();
    row = row * rotation_block(pol.phi).cast<cxd>();
    return h0 * kron(row, Mat(d_rx * d_tx.adjoint()));
}

ChannelRealization sample_channel(const ChannelConfig& cfg, const ArrayGeometry& tx_geom,
                                  const ArrayGeometry& rx_geom, std::uint64_t seed) {
    cfg.validate();
    if (!tx_geom.dual_pol || !rx_geom.dual_pol) {
        throw config_error("sample_channel requires dual-polarized geometries at both ends");
    }

    Rng rng = make_rng(seed);
    ChannelRealization ch;
    ch.tx_geom = tx_geom;
    ch.rx_geom = rx_geom;
    ch.k_linear = cfg.k_linear();

    const double chi = uniform_real(rng, cfg.chi_min, cfg.chi_max);
    const double phi = uniform_real(rng, cfg.phi_min, cfg.phi_max);

    auto draw_path = [&](bool los) {
        PathComponent p;
        p.zeta_vv = uniform_real(rng, 0.0, kTwoPi);
        p.zeta_vh = uniform_real(rng, 0.0, kTwoPi);
        p.zeta_hv = uniform_real(rng, 0.0, kTwoPi);
        p.zeta_hh = uniform_real(rng, 0.0, kTwoPi);
        p.aod_az = uniform_real(rng, cfg.az_min, cfg.az_max);
        p.aod_el = uniform_real(rng, cfg.el_min, cfg.el_max);
        p.aoa_az = uniform_real(rng, cfg.az_min, cfg.az_max);
        p.aoa_el = uniform_real(rng, cfg.el_min, cfg.el_max);
        p.gain = los ? random_phase(rng) : complex_normal(rng);
        return p;
    };

    ch.paths.push_back(draw_path(true));
    for (int i = 0; i < cfg.n_nlos; ++i) ch.paths.push_back(draw_path(false));

    ch.pol = ch.paths[0].pol(chi, phi);

    const double power = tx_geom.port_count() * rx_geom.port_count() / 4.0;
    // n_nlos == 0 selects the pure-LOS limit: all power on the direct path.
    const double k = ch.k_linear;
    const double w_los =
        cfg.n_nlos == 0 ? std::sqrt(power) : std::sqrt(k / (1.0 + k) * power);
    const double w_nlos =
        cfg.n_nlos == 0 ? 0.0 : std::sqrt(power / (1.0 + k)) / std::sqrt(double(cfg.n_nlos));

    const PathComponent& los = ch.paths[0];
    ch.h = w_los * path_component(los.pol(chi, phi), los.gain, los.aod_az, los.aod_el, los.aoa_az,
                                  los.aoa_el, tx_geom, rx_geom);
    for (int i = 1; i < static_cast<int>(ch.paths.size()); ++i) {
        const PathComponent& p = ch.paths[i];
        ch.h += w_nlos * path_component(p.pol(chi, phi), p.gain, p.aod_az, p.aod_el, p.aoa_az,
                                        p.aoa_el, tx_geom, rx_geom);
    }
    return ch;
}

}  // namespace dpbeam

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
// Dual-polarization channel state: cross-polarization leakage chi, antenna
// rotation phi, and the four co-/cross-polarization phases. Provides the
// derived leakage coefficients rho_*, the receive-side projections xi_*, and
// the normalization constants used by the lift operations.

#ifndef DPBEAM_POLARIZATION_HPP
#define DPBEAM_POLARIZATION_HPP

#include "dpbeam/types.hpp"

namespace dpbeam {

struct PolarizationState {
    double chi = 0.0;  // cross-polarization power leakage, in [0, 1]
    double phi = 0.0;  // relative antenna rotation angle (radians)
    double zeta_vv = 0.0;
    double zeta_vh = 0.0;
    double zeta_hv = 0.0;
    double zeta_hh = 0.0;

    PolarizationState() = default;
    PolarizationState(double chi_, double phi_, double zvv = 0.0, double zvh = 0.0,
                      double zhv = 0.0, double zhh = 0.0);

    // Leakage coefficients: co-polarization magnitude sqrt(1/(1+chi)),
    // cross-polarization magnitude sqrt(chi/(1+chi)).
    cxd rho_vv() const;
    cxd rho_vh() const;
    cxd rho_hv() const;
    cxd rho_hh() const;

    // |rho_vv|^2 + |rho_vh|^2 == 1 identically, so the transmit-lift
    // normalization is exactly 1; both are asserted at construction.
    double xi_v() const { return 1.0; }
    cxd xi_h() const;  // rho_vv*conj(rho_hv) + rho_vh*conj(rho_hh)

    double b_tx() const { return 1.0; }
    // 1/sqrt(|xi_v|^2 + |xi_h|^2), receive-lift normalization.
    double b_rx() const;

    // True co-polarization phase ratio e^{j(zeta_vv - zeta_vh)}; ground truth
    // for the transmit-side pilot estimator.
    cxd tx_phase_ratio() const;
    // True receive-side ratio xi_v/xi_h; ground truth for the receive-side
    // pilot estimator.
    cxd rx_ratio() const;
};

// Block polarization rotation acting on a dual-polarized port vector:
// [[cos(phi), -sin(phi)], [sin(phi), cos(phi)]] (x) I_half.
RMat rotation_matrix(double phi, int half_dim);

}  // namespace dpbeam

#endif  // DPBEAM_POLARIZATION_HPP

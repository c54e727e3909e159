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

#ifndef DPBEAM_TYPES_HPP
#define DPBEAM_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace dpbeam {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;  // column vector of complex weights
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Spatial frequency (phase progression per antenna element, radians).
// Distinct from a physical pointing angle: angles are converted to spatial
// frequencies exactly once, at the steering-vector boundary.
struct SpatialFreq {
    double rad = 0.0;
    SpatialFreq() = default;
    explicit SpatialFreq(double r) : rad(r) {}
};

// Raised for semantically invalid configuration (bad dimensions, empty
// coverage, malformed criterion names, ...). CLI maps this to exit code 2.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a file cannot be read or written. CLI maps this to exit code 3.
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the pilot-based ratio estimator degenerates (a block sum or a
// quotient denominator collapses below threshold). Callers may retry with a
// longer pilot sequence.
class estimation_error : public std::runtime_error {
  public:
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the dominant-eigenvector iteration fails to converge; carries
// the last residual norm for diagnosis.
class eigen_error : public std::runtime_error {
  public:
    eigen_error(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual = 0.0;
};

// Raised when a beamformer candidate degenerates (e.g. a combination vector
// annihilates its dictionary block). Selection loops treat it as "skip this
// candidate".
class candidate_error : public std::runtime_error {
  public:
    explicit candidate_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dpbeam

#endif  // DPBEAM_TYPES_HPP

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
// Seed derivation and distribution helpers. Every stochastic operation takes
// an explicit seed or generator; there is no global RNG state. Substreams
// (per trial, per codeword pair, per pilot symbol) are derived from a master
// seed with a splitmix64-style mixer so that results do not depend on
// evaluation order or thread count.

#ifndef DPBEAM_RNG_HPP
#define DPBEAM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "dpbeam/types.hpp"

namespace dpbeam {

// splitmix64 finalizer: cheap, well-mixed 64-bit hash step.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-aware combination of a parent seed with a stream index.
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t stream) {
    return splitmix64(splitmix64(parent) ^ (stream * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
}

inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(parent, a), b);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed ^ 0xa0761d6478bd642fULL)); }

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
inline cxd complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

// Unit-magnitude complex number with uniform phase.
inline cxd random_phase(Rng& rng) {
    const double theta = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
    return {std::cos(theta), std::sin(theta)};
}

}  // namespace dpbeam

#endif  // DPBEAM_RNG_HPP

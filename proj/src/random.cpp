// SPDX-License-Identifier: Apache-2.0
//
// irscrb: Cramer-Rao bound evaluation and beamforming design for
// reflecting-surface assisted non-line-of-sight sensing.
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

#include "irscrb/random.hpp"

namespace irscrb {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

Stream::Stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(hash_tag(purpose)) ^ mix64(index * kGolden + 1))) {}

Stream Stream::substream(std::string_view purpose, std::uint64_t index) const {
    return Stream(mix64(key_ ^ mix64(hash_tag(purpose) + kGolden)) ^ mix64(index * kGolden + 7));
}

std::uint64_t Stream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double Stream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Stream::phase() { return 2.0 * kPi * (1.0 - uniform()); }

double Stream::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_normal_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
}

cd Stream::complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = standard_normal();
    const double im = standard_normal();
    return {s * re, s * im};
}

CVector Stream::complex_normal_vector(Eigen::Index n, double variance) {
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = complex_normal(variance);
    return out;
}

CMatrix Stream::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance) {
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_normal(variance);
    return out;
}

CVector Stream::unit_modulus_vector(Eigen::Index n) {
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = std::polar(1.0, phase());
    return out;
}

}  // namespace irscrb

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

#ifndef IRSCRB_RANDOM_HPP
#define IRSCRB_RANDOM_HPP

#include "irscrb/core.hpp"

#include <cstdint>
#include <string_view>

namespace irscrb {

/// Counter-based random stream.
///
/// Every stream is identified by (seed, purpose tag, index); the n-th draw is
/// a pure function of that key and n, so substreams for different purposes or
/// Monte-Carlo trials never overlap and can be generated in any order or
/// thread. Draws are bit-reproducible across platforms (no std:: distributions).
class Stream {
public:
    Stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

    /// Derive an independent child stream (e.g. one per trial).
    Stream substream(std::string_view purpose, std::uint64_t index = 0) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform phase on (0, 2*pi].
    double phase();
    double standard_normal();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cd complex_normal(double variance = 1.0);

    CVector complex_normal_vector(Eigen::Index n, double variance = 1.0);
    CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);
    /// Vector of exp(j*phase) with i.i.d. uniform phases.
    CVector unit_modulus_vector(Eigen::Index n);

    std::uint64_t key() const { return key_; }

private:
    explicit Stream(std::uint64_t key) : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view tag);

}  // namespace irscrb

#endif  // IRSCRB_RANDOM_HPP

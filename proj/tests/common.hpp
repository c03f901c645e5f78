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

#ifndef IRSCRB_TESTS_COMMON_HPP
#define IRSCRB_TESTS_COMMON_HPP

#include "irscrb/random.hpp"
#include "irscrb/scene.hpp"

#include <algorithm>
#include <cmath>

namespace testing {

using namespace irscrb;

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double rel_err(const CMatrix& got, const CMatrix& want) {
    return (got - want).norm() / std::max(want.norm(), 1e-300);
}

/// i.i.d. CN(0,1) channel, optionally scaled.
inline Channel random_channel(Eigen::Index n, Eigen::Index m, Stream& rng, double scale = 1.0) {
    return Channel(scale * rng.complex_normal_matrix(n, m));
}

/// Random Hermitian PSD matrix of given rank with trace `trace`.
inline CMatrix random_psd(Eigen::Index m, Stream& rng, double trace = 1.0, Eigen::Index rank = -1) {
    const CMatrix f = rng.complex_normal_matrix(m, rank < 0 ? m : rank);
    CMatrix r = f * f.adjoint();
    return r * (trace / r.trace().real());
}

inline CMatrix random_unitary(Eigen::Index n, Stream& rng) {
    Eigen::HouseholderQR<CMatrix> qr(rng.complex_normal_matrix(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

/// Default paper geometry with sensible linear budgets.
inline Scenario paper_scenario(int antennas = 8, int elements = 8) {
    Scenario s;
    s.antennas = antennas;
    s.elements = elements;
    s.tx_power = dbm_to_watts(30.0);
    s.noise_power = dbm_to_watts(-120.0);
    return s;
}

}  // namespace testing

#endif  // IRSCRB_TESTS_COMMON_HPP

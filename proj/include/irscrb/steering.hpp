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

#ifndef IRSCRB_STEERING_HPP
#define IRSCRB_STEERING_HPP

#include "irscrb/core.hpp"

namespace irscrb {

/// Uniform-linear-array response a(theta): a_n = exp(j 2 pi s (n-1) sin theta),
/// s = element spacing over wavelength.
template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> steering_vector(Real theta, Eigen::Index n,
                                                                      Real spacing_ratio) {
    require(n >= 1, "steering_vector: need at least one element");
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> a(n);
    const Real step = Real(2) * std::numbers::pi_v<Real> * spacing_ratio * std::sin(theta);
    for (Eigen::Index i = 0; i < n; ++i) a(i) = std::polar(Real(1), step * static_cast<Real>(i));
    return a;
}

/// Element-index weights D = diag(0, 1, ..., N-1) as a vector.
template <typename Real = double>
Eigen::Matrix<Real, Eigen::Dynamic, 1> element_indices(Eigen::Index n) {
    return Eigen::Matrix<Real, Eigen::Dynamic, 1>::LinSpaced(n, Real(0), static_cast<Real>(n - 1));
}

}  // namespace irscrb

#endif  // IRSCRB_STEERING_HPP

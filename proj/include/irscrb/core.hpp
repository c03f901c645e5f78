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

#ifndef IRSCRB_CORE_HPP
#define IRSCRB_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irscrb {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr const char* kVersion = "0.1.0";

// Singular values below this fraction of the largest one do not count towards rank.
inline constexpr double kRankTolerance = 1e-9;

/// Input outside the mathematical domain of an operation (e.g. non-positive distance).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Caller broke an interface contract: wrong dimensions, non-Hermitian input, ...
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The requested parameter is not identifiable from the echo (singular FIM).
struct EstimabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A waveform with the requested sample coherence cannot be built with this dwell length.
struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem size exceeds a guard meant for validation-only code paths.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

template <typename Real>
constexpr Real dbm_to_watts(Real dbm) {
    return std::pow(Real(10), (dbm - Real(30)) / Real(10));
}

template <typename Real>
constexpr Real db_to_linear(Real db) {
    return std::pow(Real(10), db / Real(10));
}

template <typename Real>
Real to_db(Real linear) {
    return Real(10) * std::log10(linear);
}

/// Number of singular values above kRankTolerance times the largest.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& singular_values,
                   double tolerance = kRankTolerance) {
    if (singular_values.size() == 0 || !(singular_values.maxCoeff() > 0.0)) return 0;
    const double threshold = tolerance * singular_values.maxCoeff();
    int rank = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i)
        if (singular_values(i) > threshold) ++rank;
    return rank;
}

/// (A + A^H) / 2. Re tr(A X) equals tr(hermitian_part(A) X) for Hermitian X.
inline CMatrix hermitian_part(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

inline bool is_hermitian(const CMatrix& a, double rel_tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(a.norm(), 1e-300);
    return (a - a.adjoint()).norm() <= rel_tol * scale;
}

inline bool is_unit_modulus(const CVector& v, double tol = 1e-9) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(std::abs(v(i)) - 1.0) > tol) return false;
    return true;
}

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractError(message);
}

}  // namespace irscrb

#endif  // IRSCRB_CORE_HPP

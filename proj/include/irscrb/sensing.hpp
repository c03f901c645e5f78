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

#ifndef IRSCRB_SENSING_HPP
#define IRSCRB_SENSING_HPP

#include "irscrb/core.hpp"
#include "irscrb/scene.hpp"
#include "irscrb/steering.hpp"

#include <optional>

namespace irscrb {

/// b = G^T A v and its angle derivative db/dtheta = j 2 pi s cos(theta) G^T A D v.
struct EchoDirections {
    CVector b;
    CVector b_dot;
};

EchoDirections echo_directions(const Channel& channel, const CVector& v, double theta, double spacing_ratio);

/// Traces that make up the point-target FIM, with B = b b^T and
/// B' = b' b^T + b b'^T:
///   a = tr(B' R B'^H), c = tr(B R B'^H), d = tr(B R B^H).
struct FisherTerms {
    double a = 0.0;
    cd c{0.0, 0.0};
    double d = 0.0;

    /// a - |c|^2 / d, the information on theta left after removing the nuisance alpha.
    double schur() const { return d > 0.0 ? a - std::norm(c) / d : 0.0; }
};

FisherTerms fisher_terms(const EchoDirections& dirs, const CMatrix& rx);

/// 3x3 FIM over (theta, Re alpha, Im alpha).
struct PointFim {
    Eigen::Matrix3d f;

    double theta_theta() const { return f(0, 0); }
    Eigen::RowVector2d theta_alpha() const { return f.block<1, 2>(0, 1); }
    Eigen::Matrix2d alpha_alpha() const { return f.block<2, 2>(1, 1); }
};

PointFim fim_point(const Channel& channel, const CVector& v, const CMatrix& rx, double theta, cd alpha,
                   int dwell, double noise_power, double spacing_ratio);

enum class CrbStatus {
    estimable,
    rank_deficient,  // channel rank too low for the target model
    endfire,         // cos(theta) = 0, the array has no angular sensitivity
    no_information,  // remaining Fisher information is zero (e.g. alpha = 0 or R_x = 0)
};

const char* to_string(CrbStatus status);

struct CrbReport {
    double value = kInf;  // +inf whenever estimable is false
    bool estimable = false;
    CrbStatus status = CrbStatus::no_information;
    int channel_rank = 0;
    std::optional<double> fim_determinant;
    /// Point target only: the same bound evaluated through the reflection-vector
    /// form (R_1, R_2, D). Agrees with `value` up to rounding.
    std::optional<double> reflective_form;
};

/// Quantities of the bound written as a function of the reflection vector v.
struct ReflectGeometry {
    CVector a;      // steering vector a(theta)
    RVector d;      // diag(D) = 0, 1, ..., N-1
    CMatrix r1;     // A^H G* G^T A
    CMatrix r2;     // A^H G* R_x* G^T A
};

ReflectGeometry reflect_geometry(const Channel& channel, const CMatrix& rx, double theta, double spacing_ratio);

/// Denominator of the reflection-vector form of the bound:
///   v^H R2 v (v^H D R1 D v - |v^H D R1 v|^2 / v^H R1 v)
/// + v^H R1 v (v^H D R2 D v - |v^H D R2 v|^2 / v^H R2 v).
/// `d` may be any real weight vector (callers rescale D for conditioning).
double reflective_objective(const CVector& v, const CMatrix& r1, const CMatrix& r2, const RVector& d);

/// CRB(theta) from the reflective objective; +inf when the objective vanishes.
double crb_from_reflective(double objective, double theta, cd alpha, int dwell, double noise_power,
                           double spacing_ratio);

/// DoA bound of a point target. Non-estimable configurations return +inf with a status.
CrbReport crb_point(const Channel& channel, const CVector& v, const CMatrix& rx, double theta, cd alpha,
                    int dwell, double noise_power, double spacing_ratio);

/// Bound on the squared Frobenius error of the target response matrix:
/// (sigma^2 / T) tr((G R G^H)^-1) tr((G G^H)^-1). Independent of the IRS phases.
CrbReport crb_extended(const Channel& channel, const CMatrix& rx, int dwell, double noise_power);

/// Explicit 2N^2 x 2N^2 FIM over (Re vec H, Im vec H). Validation only.
RMatrix fim_extended_explicit(const Channel& channel, const CVector& v, const CMatrix& rx, int dwell,
                              double noise_power, int max_elements = 4);

}  // namespace irscrb

#endif  // IRSCRB_SENSING_HPP

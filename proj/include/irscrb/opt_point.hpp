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

#ifndef IRSCRB_OPT_POINT_HPP
#define IRSCRB_OPT_POINT_HPP

#include "irscrb/core.hpp"
#include "irscrb/random.hpp"
#include "irscrb/scene.hpp"
#include "irscrb/sdp.hpp"
#include "irscrb/sensing.hpp"

#include <functional>
#include <vector>

namespace irscrb {

struct OptimizerParams {
    int randomizations = 500;
    double tol_outer = 1e-3;  // relative CRB change
    int max_outer = 20;
    double tol_inner = 1e-4;  // relative change of the relaxed objective
    int max_inner = 30;
    sdp::Settings solver;
};

struct TransmitResult {
    CMatrix rx;
    double objective = 0.0;  // a - |c|^2 / d at rx, evaluated directly
    double sdp_value = 0.0;  // optimal epigraph variable of the semidefinite program
    sdp::Status status = sdp::Status::max_iter;
    int iterations = 0;
};

/// Transmit coherence maximizing the angle information left after removing
/// the nuisance reflection coefficient, for fixed IRS phases. Trace equals P0.
/// Throws EstimabilityError when rank(G) < 2.
TransmitResult solve_transmit(const Channel& channel, const CVector& v, double theta, double tx_power,
                              double spacing_ratio, const sdp::Settings& settings = {});

/// Point of the lifted reflective problem: V Hermitian PSD with unit diagonal
/// and the two Schur epigraph variables.
struct ScaState {
    CMatrix v;
    double t1 = 0.0;
    double t2 = 0.0;
};

/// Tight state for a unit-modulus vector: V = v v^H and t1, t2 at their lower bounds.
ScaState lift(const CVector& v, const CMatrix& r1, const CMatrix& r2, const RVector& d);

/// Convex part f1 = (l1^2 + l2^2 + l3^2 + l4^2) / 4 with
///   l1 = tr((R2 + D R1 D) V), l2 = tr(R2 V) - t1, l3 = tr((R1 + D R2 D) V), l4 = tr(R1 V) - t2.
double sca_convex_part(const ScaState& s, const CMatrix& r1, const CMatrix& r2, const RVector& d);
/// Concave part f2 = -(m1^2 + m2^2 + m3^2 + m4^2) / 4 with
///   m1 = tr((R2 - D R1 D) V), m2 = tr(R2 V) + t1, m3 = tr((R1 - D R2 D) V), m4 = tr(R1 V) + t2.
double sca_concave_part(const ScaState& s, const CMatrix& r1, const CMatrix& r2, const RVector& d);
/// f1 + f2 = tr(R2 V)(tr(D R1 D V) - t1) + tr(R1 V)(tr(D R2 D V) - t2).
double sca_objective(const ScaState& s, const CMatrix& r1, const CMatrix& r2, const RVector& d);

/// Affine minorant of f1 at an expansion point:
///   Re tr(v_coefficient V) + t1_coefficient t1 + t2_coefficient t2 + constant.
struct ScaSurrogate {
    CMatrix v_coefficient;  // Hermitian
    double t1_coefficient = 0.0;
    double t2_coefficient = 0.0;
    double constant = 0.0;

    double operator()(const ScaState& s) const;
};

ScaSurrogate sca_surrogate(const ScaState& at, const CMatrix& r1, const CMatrix& r2, const RVector& d);

enum class ReflectiveStatus { converged, iteration_limit, solver_failure };

const char* to_string(ReflectiveStatus status);

struct ReflectiveResult {
    CVector v;
    double objective = 0.0;          // reflective_objective of v (original scaling)
    double initial_objective = 0.0;  // same for the starting vector
    double randomization_best = 0.0; // best objective among randomized candidates alone
    CMatrix relaxed;                 // SCA solution of the lifted problem
    std::vector<double> inner_history;  // relaxed objective per SCA iterate, starting point first
    int inner_iterations = 0;
    ReflectiveStatus status = ReflectiveStatus::converged;
};

/// IRS phases for fixed transmit coherence: SCA on the lifted problem followed
/// by Gaussian randomization. Never returns a vector worse than v_init.
ReflectiveResult solve_reflective(const Channel& channel, const CMatrix& rx, double theta, const CVector& v_init,
                                  double spacing_ratio, const OptimizerParams& params, Stream& rng);

/// Best unit-modulus projection exp(j arg z) over `draws` samples z ~ CN(0, relaxed)
/// and the given extra candidates. Returns the winner and writes its value.
CVector randomize_phases(const CMatrix& relaxed, int draws, Stream& rng,
                         const std::function<double(const CVector&)>& objective,
                         const std::vector<CVector>& extra_candidates, double& best_value,
                         double* best_random_value = nullptr);

struct OuterRecord {
    double crb = kInf;
    CMatrix rx;
    CVector v;
    int inner_iterations = 0;
    double randomization_best = 0.0;
    sdp::Status transmit_status = sdp::Status::optimal;
    ReflectiveStatus reflective_status = ReflectiveStatus::converged;
};

struct Algorithm1Trace {
    double initial_crb = kInf;  // isotropic transmission with the random starting phases
    std::vector<OuterRecord> records;
    bool converged = false;

    int outer_iterations() const { return static_cast<int>(records.size()); }
    const OuterRecord& final() const { return records.back(); }
};

/// Magnitude of the reflection coefficient implied by the scenario geometry.
double nominal_alpha(const Scenario& scenario);

/// Alternating transmit / reflective design for a point target at design angle theta.
Algorithm1Trace algorithm1(const Scenario& scenario, const Channel& channel, double theta,
                           const OptimizerParams& params, Stream& rng);

}  // namespace irscrb

#endif  // IRSCRB_OPT_POINT_HPP

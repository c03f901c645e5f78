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

#include "irscrb/opt_point.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

namespace irscrb {

namespace {

using sdp::complex_functional;
using sdp::entry_functional;

constexpr cd kJ{0.0, 1.0};

double trace_real(const CMatrix& k, const CMatrix& v) { return (k * v).trace().real(); }

/// Re tr(K V) for the rank-one V = v v^H.
double quad(const CMatrix& k, const CVector& v) { return v.dot(k * v).real(); }

CMatrix diag_sandwich(const RVector& d, const CMatrix& r) { return d.asDiagonal() * r * d.asDiagonal(); }

double relative_change(double now, double before) {
    return std::abs(now - before) / std::max({std::abs(now), std::abs(before), 1e-300});
}

}  // namespace

// ---------------------------------------------------------------- transmit

TransmitResult solve_transmit(const Channel& channel, const CVector& v, double theta, double tx_power,
                              double spacing_ratio, const sdp::Settings& settings) {
    require(tx_power > 0.0, "solve_transmit: transmit power must be positive");
    if (channel.rank() < 2) throw EstimabilityError("solve_transmit: angle not estimable with rank(G) < 2");

    const EchoDirections dirs = echo_directions(channel, v, theta, spacing_ratio);
    CMatrix bb = dirs.b * dirs.b.transpose();
    CMatrix bb_dot = dirs.b_dot * dirs.b.transpose() + dirs.b * dirs.b_dot.transpose();
    const double nb = bb.norm();
    const double nb_dot = bb_dot.norm();
    if (!(nb > 0.0) || !(nb_dot > 0.0)) throw EstimabilityError("solve_transmit: echo carries no angle information");
    bb /= nb;
    bb_dot /= nb_dot;

    const auto m = static_cast<int>(channel.antennas());
    const RMatrix f_a = complex_functional(bb_dot.adjoint() * bb_dot);
    const RMatrix f_re_c = complex_functional(bb_dot.adjoint() * bb);
    const RMatrix f_im_c = complex_functional(-kJ * (bb_dot.adjoint() * bb));
    const RMatrix f_d = complex_functional(bb.adjoint() * bb);

    // Blocks: embedded R / P0, the real 3x3 form of [[a - t, c], [c*, d]], power slack.
    sdp::Problem p;
    p.sense = sdp::Sense::maximize;
    const int rb = p.add_block(2 * m);
    const int sb = p.add_block(3);
    const int wb = p.add_block(1);
    p.objective[rb] = f_a;
    p.objective[sb] = -entry_functional(3, 0, 0);

    auto link = [&](int i, int j, const RMatrix& f) {
        p.add_constraint({{{sb, entry_functional(3, i, j)}, {rb, -f}}, 0.0});
    };
    link(1, 1, f_d);
    link(2, 2, f_d);
    link(0, 1, f_re_c);
    link(0, 2, f_im_c);
    p.add_constraint({{{sb, entry_functional(3, 1, 2)}}, 0.0});
    p.add_constraint({{{rb, RMatrix::Identity(2 * m, 2 * m) / 2.0}, {wb, RMatrix::Identity(1, 1)}}, 1.0});

    const sdp::Solution sol = sdp::solve(p, settings);

    TransmitResult out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    CMatrix rx = sdp::extract_hermitian<double>(sol.x[rb]);
    const double tr = rx.trace().real();
    if (!(tr > 0.0)) {
        rx = CMatrix::Identity(m, m) / static_cast<double>(m);
        out.status = sdp::Status::max_iter;
    }
    out.rx = tx_power * rx / rx.trace().real();
    out.rx = hermitian_part(out.rx);
    out.sdp_value = nb_dot * nb_dot * tx_power * sol.primal_objective;
    out.objective = fisher_terms(dirs, out.rx).schur();
    return out;
}

// ---------------------------------------------------------------- lifted reflective problem

ScaState lift(const CVector& v, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    ScaState s;
    s.v = v * v.adjoint();
    const CVector dv = d.cast<cd>().cwiseProduct(v);
    const double q1 = quad(r1, v);
    const double q2 = quad(r2, v);
    s.t1 = q1 > 0.0 ? std::norm(dv.dot(r1 * v)) / q1 : 0.0;
    s.t2 = q2 > 0.0 ? std::norm(dv.dot(r2 * v)) / q2 : 0.0;
    return s;
}

double sca_convex_part(const ScaState& s, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    const double l1 = trace_real(r2 + diag_sandwich(d, r1), s.v);
    const double l2 = trace_real(r2, s.v) - s.t1;
    const double l3 = trace_real(r1 + diag_sandwich(d, r2), s.v);
    const double l4 = trace_real(r1, s.v) - s.t2;
    return (l1 * l1 + l2 * l2 + l3 * l3 + l4 * l4) / 4.0;
}

double sca_concave_part(const ScaState& s, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    const double m1 = trace_real(r2 - diag_sandwich(d, r1), s.v);
    const double m2 = trace_real(r2, s.v) + s.t1;
    const double m3 = trace_real(r1 - diag_sandwich(d, r2), s.v);
    const double m4 = trace_real(r1, s.v) + s.t2;
    return -(m1 * m1 + m2 * m2 + m3 * m3 + m4 * m4) / 4.0;
}

double sca_objective(const ScaState& s, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    return trace_real(r2, s.v) * (trace_real(diag_sandwich(d, r1), s.v) - s.t1) +
           trace_real(r1, s.v) * (trace_real(diag_sandwich(d, r2), s.v) - s.t2);
}

double ScaSurrogate::operator()(const ScaState& s) const {
    return trace_real(v_coefficient, s.v) + t1_coefficient * s.t1 + t2_coefficient * s.t2 + constant;
}

ScaSurrogate sca_surrogate(const ScaState& at, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    const CMatrix ka = r2 + diag_sandwich(d, r1);
    const CMatrix kb = r1 + diag_sandwich(d, r2);
    const double l1 = trace_real(ka, at.v);
    const double l2 = trace_real(r2, at.v) - at.t1;
    const double l3 = trace_real(kb, at.v);
    const double l4 = trace_real(r1, at.v) - at.t2;

    // Gradient of sum l_i^2 / 4 is sum (l_i / 2) grad l_i.
    ScaSurrogate s;
    s.v_coefficient = hermitian_part(l1 / 2.0 * ka + l2 / 2.0 * r2 + l3 / 2.0 * kb + l4 / 2.0 * r1);
    s.t1_coefficient = -l2 / 2.0;
    s.t2_coefficient = -l4 / 2.0;
    s.constant = -(l1 * l1 + l2 * l2 + l3 * l3 + l4 * l4) / 4.0;
    return s;
}

namespace {

/// Surrogate problem at one SCA iterate. Blocks: embedded V, the two real 3x3
/// Schur forms (t1, t2 in their top-left corners) and the epigraph
/// [[u, q^T], [q, I]] bounding the concave part.
sdp::Problem surrogate_problem(const ScaSurrogate& sur, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    const auto n = static_cast<int>(r1.rows());
    sdp::Problem p;
    p.sense = sdp::Sense::maximize;
    const int vb = p.add_block(2 * n);
    const int s1 = p.add_block(3);
    const int s2 = p.add_block(3);
    const int eb = p.add_block(5);

    p.objective[vb] = complex_functional(sur.v_coefficient);
    p.objective[s1] = sur.t1_coefficient * entry_functional(3, 0, 0);
    p.objective[s2] = sur.t2_coefficient * entry_functional(3, 0, 0);
    p.objective[eb] = -entry_functional(5, 0, 0);

    for (int i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        p.add_constraint({{{vb, complex_functional(e)}}, 1.0});
    }

    auto schur_links = [&](int blk, const CMatrix& r) {
        const RMatrix fr = complex_functional(r);
        const CMatrix dr = d.cast<cd>().asDiagonal() * r;
        p.add_constraint({{{blk, entry_functional(3, 1, 1)}, {vb, -fr}}, 0.0});
        p.add_constraint({{{blk, entry_functional(3, 2, 2)}, {vb, -fr}}, 0.0});
        p.add_constraint({{{blk, entry_functional(3, 0, 1)}, {vb, -complex_functional(dr)}}, 0.0});
        p.add_constraint({{{blk, entry_functional(3, 0, 2)}, {vb, -complex_functional(-kJ * dr)}}, 0.0});
        p.add_constraint({{{blk, entry_functional(3, 1, 2)}}, 0.0});
    };
    schur_links(s1, r1);
    schur_links(s2, r2);

    for (int i = 1; i < 5; ++i)
        for (int j = i; j < 5; ++j) p.add_constraint({{{eb, entry_functional(5, i, j)}}, i == j ? 1.0 : 0.0});

    // q_i = m_i / 2.
    const RMatrix t_entry = entry_functional(3, 0, 0);
    p.add_constraint({{{eb, entry_functional(5, 0, 1)}, {vb, -complex_functional(r2 - diag_sandwich(d, r1)) / 2.0}}, 0.0});
    p.add_constraint({{{eb, entry_functional(5, 0, 2)}, {vb, -complex_functional(r2) / 2.0}, {s1, -t_entry / 2.0}}, 0.0});
    p.add_constraint({{{eb, entry_functional(5, 0, 3)}, {vb, -complex_functional(r1 - diag_sandwich(d, r2)) / 2.0}}, 0.0});
    p.add_constraint({{{eb, entry_functional(5, 0, 4)}, {vb, -complex_functional(r1) / 2.0}, {s2, -t_entry / 2.0}}, 0.0});
    return p;
}

}  // namespace

const char* to_string(ReflectiveStatus status) {
    switch (status) {
        case ReflectiveStatus::converged: return "converged";
        case ReflectiveStatus::iteration_limit: return "iteration-limit";
        case ReflectiveStatus::solver_failure: return "solver-failure";
    }
    return "unknown";
}

CVector randomize_phases(const CMatrix& relaxed, int draws, Stream& rng,
                         const std::function<double(const CVector&)>& objective,
                         const std::vector<CVector>& extra_candidates, double& best_value,
                         double* best_random_value) {
    const Eigen::Index n = relaxed.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(relaxed));
    const CMatrix factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cd>().asDiagonal();

    auto project = [](const CVector& z) {
        CVector v(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) v(i) = std::abs(z(i)) > 0.0 ? z(i) / std::abs(z(i)) : cd(1.0, 0.0);
        return v;
    };

    CVector best;
    best_value = -kInf;
    double random_best = -kInf;
    for (int k = 0; k < draws; ++k) {
        const CVector v = project(factor * rng.complex_normal_vector(n));
        const double val = objective(v);
        if (val > random_best) random_best = val;
        if (val > best_value) {
            best_value = val;
            best = v;
        }
    }
    for (const CVector& v : extra_candidates) {
        const double val = objective(v);
        if (val > best_value || best.size() == 0) {
            best_value = val;
            best = v;
        }
    }
    if (best_random_value) *best_random_value = random_best;
    if (best.size() == 0) best = CVector::Ones(n);
    return best;
}

ReflectiveResult solve_reflective(const Channel& channel, const CMatrix& rx, double theta, const CVector& v_init,
                                  double spacing_ratio, const OptimizerParams& params, Stream& rng) {
    require(v_init.size() == channel.elements(), "solve_reflective: v_init length must equal N");
    require(is_unit_modulus(v_init), "solve_reflective: v_init must be unit modulus");
    const ReflectGeometry geo = reflect_geometry(channel, rx, theta, spacing_ratio);
    const auto n = static_cast<int>(channel.elements());

    // Rescaling R1, R2 and D multiplies the objective by a constant; it only conditions the SDPs.
    const double n1 = geo.r1.norm();
    const double n2 = geo.r2.norm();
    const CMatrix r1 = n1 > 0.0 ? CMatrix(geo.r1 / n1) : geo.r1;
    const CMatrix r2 = n2 > 0.0 ? CMatrix(geo.r2 / n2) : geo.r2;
    const RVector d = n > 1 ? RVector(geo.d / (n - 1)) : geo.d;

    ReflectiveResult out;
    out.initial_objective = reflective_objective(v_init, geo.r1, geo.r2, geo.d);

    ScaState state = lift(v_init, r1, r2, d);
    double value = sca_objective(state, r1, r2, d);
    out.inner_history.push_back(value);
    out.status = ReflectiveStatus::iteration_limit;
    for (int it = 0; it < params.max_inner; ++it) {
        const sdp::Solution sol = sdp::solve(surrogate_problem(sca_surrogate(state, r1, r2, d), r1, r2, d), params.solver);
        if (!sol.optimal()) {
            spdlog::warn("solve_reflective: surrogate SDP ended with status {}", sdp::to_string(sol.status));
            out.status = ReflectiveStatus::solver_failure;
            break;
        }
        ScaState next;
        next.v = sdp::extract_hermitian<double>(sol.x[0]);
        next.t1 = sol.x[1](0, 0);
        next.t2 = sol.x[2](0, 0);
        const double next_value = sca_objective(next, r1, r2, d);
        ++out.inner_iterations;
        if (next_value < value) {
            // Solver round-off; the expansion point is already stationary.
            out.status = ReflectiveStatus::converged;
            break;
        }
        const double change = relative_change(next_value, value);
        state = next;
        value = next_value;
        out.inner_history.push_back(value);
        if (change < params.tol_inner) {
            out.status = ReflectiveStatus::converged;
            break;
        }
    }
    out.relaxed = state.v;

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(state.v));
    CVector principal = eig.eigenvectors().col(n - 1);
    for (Eigen::Index i = 0; i < principal.size(); ++i)
        principal(i) = std::abs(principal(i)) > 0.0 ? principal(i) / std::abs(principal(i)) : cd(1.0, 0.0);

    auto objective = [&](const CVector& v) { return reflective_objective(v, geo.r1, geo.r2, geo.d); };
    double best = 0.0;
    out.v = randomize_phases(state.v, params.randomizations, rng, objective, {v_init, principal}, best,
                             &out.randomization_best);
    // Candidates are compared in float; prefer the incumbent on ties or round-off.
    if (best <= out.initial_objective) {
        out.v = v_init;
        best = out.initial_objective;
    }
    out.objective = best;
    return out;
}

// ---------------------------------------------------------------- alternating driver

double nominal_alpha(const Scenario& scenario) {
    const Eigen::Vector2d where = std::visit(
        [](const auto& spec) -> Eigen::Vector2d {
            if constexpr (std::is_same_v<std::decay_t<decltype(spec)>, PointTargetSpec>) {
                return spec.position;
            } else {
                return spec.center;
            }
        },
        scenario.target);
    return reflection_magnitude(scenario, (where - scenario.irs_position).norm());
}

Algorithm1Trace algorithm1(const Scenario& scenario, const Channel& channel, double theta,
                           const OptimizerParams& params, Stream& rng) {
    if (channel.rank() < 2) throw EstimabilityError("algorithm1: angle not estimable with rank(G) < 2");
    const auto m = channel.antennas();
    const cd alpha(nominal_alpha(scenario), 0.0);
    auto crb = [&](const CMatrix& rx, const CVector& v) {
        return crb_point(channel, v, rx, theta, alpha, scenario.dwell, scenario.noise_power, scenario.spacing_ratio)
            .value;
    };

    Stream init = rng.substream("initial-phases");
    CVector v = init.unit_modulus_vector(channel.elements());
    CMatrix rx = scenario.tx_power / static_cast<double>(m) * CMatrix::Identity(m, m);

    Algorithm1Trace trace;
    trace.initial_crb = crb(rx, v);
    double previous = trace.initial_crb;
    bool have_design = false;
    for (int l = 0; l < params.max_outer; ++l) {
        OuterRecord rec;
        TransmitResult tx = solve_transmit(channel, v, theta, scenario.tx_power, scenario.spacing_ratio, params.solver);
        rec.transmit_status = tx.status;
        // Keep the incumbent unless the new coherence is at least as informative.
        const double incumbent = fisher_terms(echo_directions(channel, v, theta, scenario.spacing_ratio), rx).schur();
        if (!have_design || tx.objective >= incumbent) rx = tx.rx;
        have_design = true;

        Stream draws = rng.substream("randomization", static_cast<std::uint64_t>(l));
        ReflectiveResult refl = solve_reflective(channel, rx, theta, v, scenario.spacing_ratio, params, draws);
        v = refl.v;
        rec.inner_iterations = refl.inner_iterations;
        rec.randomization_best = refl.randomization_best;
        rec.reflective_status = refl.status;
        rec.rx = rx;
        rec.v = v;
        rec.crb = crb(rx, v);
        trace.records.push_back(rec);
        spdlog::debug("algorithm1: outer {} crb {:.6e} inner {}", l + 1, rec.crb, rec.inner_iterations);

        if (relative_change(rec.crb, previous) < params.tol_outer) {
            trace.converged = true;
            break;
        }
        previous = rec.crb;
    }
    return trace;
}

}  // namespace irscrb

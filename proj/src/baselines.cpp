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

#include "irscrb/baselines.hpp"

#include "irscrb/sdp.hpp"
#include "irscrb/steering.hpp"

namespace irscrb {

namespace {

CVector project_phases(const CVector& z) {
    CVector v(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) v(i) = std::abs(z(i)) > 0.0 ? z(i) / std::abs(z(i)) : cd(1.0, 0.0);
    return v;
}

}  // namespace

BeamformerPair snr_max_design(const Channel& channel, double theta, double tx_power, double spacing_ratio,
                              const OptimizerParams& params, Stream& rng) {
    require(tx_power > 0.0, "snr_max_design: transmit power must be positive");
    if (channel.rank() < 1) throw EstimabilityError("snr_max_design: channel is zero");
    const auto n = static_cast<int>(channel.elements());
    const CVector a = steering_vector(theta, n, spacing_ratio);
    const CMatrix gta = channel.g().transpose() * a.asDiagonal();
    const CMatrix r1 = gta.adjoint() * gta;

    // max tr(R1 V) s.t. diag(V) = 1, V >= 0, on the embedded block.
    sdp::Problem p;
    p.sense = sdp::Sense::maximize;
    const int vb = p.add_block(2 * n);
    p.objective[vb] = sdp::complex_functional(r1 / r1.norm());
    for (int i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        p.add_constraint({{{vb, sdp::complex_functional(e)}}, 1.0});
    }
    const sdp::Solution sol = sdp::solve(p, params.solver);
    const CMatrix relaxed = sol.optimal() ? sdp::extract_hermitian<double>(sol.x[vb]) : CMatrix(CMatrix::Identity(n, n));

    Eigen::SelfAdjointEigenSolver<CMatrix> eig_r1(r1);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig_v(relaxed);
    const std::vector<CVector> extra{project_phases(eig_r1.eigenvectors().col(n - 1)),
                                     project_phases(eig_v.eigenvectors().col(n - 1))};
    double best = 0.0;
    const CVector v = randomize_phases(relaxed, params.randomizations, rng,
                                       [&](const CVector& c) { return c.dot(r1 * c).real(); }, extra, best);

    const CVector b = gta * v;
    BeamformerPair out;
    out.v = v;
    out.rx = tx_power * (b.conjugate() * b.transpose()) / b.squaredNorm();
    out.rx = hermitian_part(out.rx);
    return out;
}

BeamformerPair reflective_only(const Scenario& scenario, const Channel& channel, double theta,
                               const OptimizerParams& params, Stream& rng) {
    if (channel.rank() < 2) throw EstimabilityError("reflective_only: angle not estimable with rank(G) < 2");
    BeamformerPair out;
    out.rx = isotropic_extended(scenario);
    Stream init = rng.substream("initial-phases");
    const CVector v0 = init.unit_modulus_vector(channel.elements());
    Stream draws = rng.substream("randomization");
    out.v = solve_reflective(channel, out.rx, theta, v0, scenario.spacing_ratio, params, draws).v;
    return out;
}

BeamformerPair transmit_only(const Scenario& scenario, const Channel& channel, double theta,
                             const OptimizerParams& params, Stream& rng) {
    BeamformerPair out;
    Stream init = rng.substream("initial-phases");
    out.v = init.unit_modulus_vector(channel.elements());
    out.rx = solve_transmit(channel, out.v, theta, scenario.tx_power, scenario.spacing_ratio, params.solver).rx;
    return out;
}

BeamformerPair joint_design(const Scenario& scenario, const Channel& channel, double theta,
                            const OptimizerParams& params, Stream& rng) {
    const Algorithm1Trace trace = algorithm1(scenario, channel, theta, params, rng);
    return {trace.final().rx, trace.final().v};
}

CMatrix isotropic_extended(const Scenario& scenario) {
    const int m = scenario.antennas;
    require(m >= 1, "isotropic_extended: need at least one antenna");
    return scenario.tx_power / static_cast<double>(m) * CMatrix::Identity(m, m);
}

bool feasible(const BeamformerPair& pair, double tx_power) {
    if (pair.rx.rows() != pair.rx.cols() || pair.rx.rows() == 0) return false;
    if (!is_hermitian(pair.rx, 1e-8)) return false;
    const double m = static_cast<double>(pair.rx.rows());
    if (pair.rx.trace().real() > tx_power * (1.0 + 1e-8)) return false;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(pair.rx), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-8 * tx_power / m) return false;
    return is_unit_modulus(pair.v, 1e-12);
}

}  // namespace irscrb

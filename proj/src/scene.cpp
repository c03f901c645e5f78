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

#include "irscrb/scene.hpp"
#include "irscrb/steering.hpp"

#include <string>

namespace irscrb {

void Scenario::validate() const {
    require(antennas > 1, "scenario: antennas (M) must be > 1");
    require(elements > 1, "scenario: elements (N) must be > 1");
    require(dwell >= 1, "scenario: dwell (T) must be >= 1");
    require(tx_power > 0.0, "scenario: transmit power must be positive");
    require(noise_power > 0.0, "scenario: noise power must be positive");
    require(rician_factor >= 0.0, "scenario: rician factor must be non-negative");
    require(spacing_ratio > 0.0, "scenario: element spacing ratio must be positive");
    require(pathloss.k0 > 0.0 && pathloss.d0 > 0.0, "scenario: path-loss K0 and d0 must be positive");
    if (const auto* ext = std::get_if<ExtendedTargetSpec>(&target)) {
        require(ext->count >= 1, "scenario: extended target needs at least one scatterer");
        require(ext->radius >= 0.0, "scenario: scatterer radius must be non-negative");
    }
    require((ap_position - irs_position).norm() > 0.0, "scenario: AP and IRS positions coincide");
}

double irs_angle(const Scenario& scenario, const Eigen::Vector2d& point) {
    const Eigen::Vector2d r = point - scenario.irs_position;
    return std::atan2(r.x(), -r.y());
}

double ap_departure_angle(const Scenario& scenario) {
    const Eigen::Vector2d r = scenario.irs_position - scenario.ap_position;
    return std::atan2(r.x(), r.y());
}

Channel::Channel(CMatrix g) : g_(std::move(g)) {
    Eigen::JacobiSVD<CMatrix> svd(g_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    left_ = svd.matrixU();
    sigma_ = svd.singularValues();
    right_ = svd.matrixV();
}

CMatrix line_of_sight(const Scenario& scenario) {
    const CVector a_irs =
        steering_vector(irs_angle(scenario, scenario.ap_position), scenario.elements, scenario.spacing_ratio);
    const CVector a_ap = steering_vector(ap_departure_angle(scenario), scenario.antennas, 0.5);
    return a_irs * a_ap.adjoint();
}

Channel make_channel(const Scenario& scenario, Stream& rng) {
    scenario.validate();
    const double distance = (scenario.irs_position - scenario.ap_position).norm();
    const double amplitude = std::sqrt(path_loss(distance, scenario.pathloss));
    const CMatrix los = line_of_sight(scenario);
    if (std::isinf(scenario.rician_factor)) return Channel(amplitude * los);

    const double beta = scenario.rician_factor;
    const CMatrix nlos = rng.complex_normal_matrix(scenario.elements, scenario.antennas);
    return Channel(amplitude * (std::sqrt(beta / (1.0 + beta)) * los + std::sqrt(1.0 / (1.0 + beta)) * nlos));
}

CMatrix response_matrix(const std::vector<Scatterer>& scatterers, Eigen::Index elements,
                        double spacing_ratio) {
    CMatrix h = CMatrix::Zero(elements, elements);
    for (const auto& s : scatterers) {
        const CVector a = steering_vector(s.theta, elements, spacing_ratio);
        h += s.alpha * a * a.transpose();
    }
    return h;
}

CMatrix response_matrix(const TargetModel& target, Eigen::Index elements, double spacing_ratio) {
    if (const auto* p = std::get_if<PointTarget>(&target)) {
        const CVector a = steering_vector(p->theta, elements, spacing_ratio);
        return p->alpha * a * a.transpose();
    }
    return std::get<ExtendedTarget>(target).h;
}

double reflection_magnitude(const Scenario& scenario, double distance) {
    return path_loss(distance, scenario.pathloss);
}

TargetModel make_target(const Scenario& scenario, Stream& rng) {
    scenario.validate();
    if (const auto* p = std::get_if<PointTargetSpec>(&scenario.target)) {
        const double d = (p->position - scenario.irs_position).norm();
        PointTarget t;
        t.theta = irs_angle(scenario, p->position);
        t.alpha = std::polar(reflection_magnitude(scenario, d), rng.phase());
        return t;
    }

    const auto& spec = std::get<ExtendedTargetSpec>(scenario.target);
    ExtendedTarget t;
    t.scatterers.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        const double r = spec.radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * kPi * rng.uniform();
        const Eigen::Vector2d pos = spec.center + r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        const double d = (pos - scenario.irs_position).norm();
        t.scatterers.push_back({irs_angle(scenario, pos), std::polar(reflection_magnitude(scenario, d), rng.phase())});
    }
    t.h = response_matrix(t.scatterers, scenario.elements, scenario.spacing_ratio);
    return t;
}

Waveform synthesize_waveform(const CMatrix& rx, int dwell) {
    require(rx.rows() == rx.cols(), "synthesize_waveform: coherence matrix must be square");
    require(is_hermitian(rx), "synthesize_waveform: coherence matrix must be Hermitian");
    require(dwell >= 1, "synthesize_waveform: dwell must be positive");

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rx);
    const RVector& lambda = eig.eigenvalues();  // ascending
    const double top = std::max(lambda.maxCoeff(), 0.0);
    require(lambda.minCoeff() >= -1e-10 * std::max(top, 1e-300),
            "synthesize_waveform: coherence matrix must be positive semidefinite");

    const Eigen::Index m = rx.rows();
    std::vector<Eigen::Index> beams;
    for (Eigen::Index i = m - 1; i >= 0; --i)
        if (lambda(i) > 1e-12 * top) beams.push_back(i);
    const auto k = static_cast<Eigen::Index>(beams.size());
    if (k > dwell)
        throw SynthesisError("synthesize_waveform: dwell " + std::to_string(dwell) + " shorter than rank " +
                             std::to_string(k));

    // Orthonormal rows taken from the DFT basis.
    CMatrix mixing(k, dwell);
    const double norm = 1.0 / std::sqrt(static_cast<double>(dwell));
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index t = 0; t < dwell; ++t)
            mixing(i, t) = std::polar(norm, -2.0 * kPi * static_cast<double>((i * t) % dwell) / dwell);

    CMatrix beams_matrix(m, k);
    for (Eigen::Index i = 0; i < k; ++i)
        beams_matrix.col(i) = eig.eigenvectors().col(beams[static_cast<std::size_t>(i)]) *
                              std::sqrt(lambda(beams[static_cast<std::size_t>(i)]));
    return {std::sqrt(static_cast<double>(dwell)) * beams_matrix * mixing};
}

CMatrix noiseless_echo(const Channel& channel, const CVector& v, const CMatrix& h, const CMatrix& x) {
    const Eigen::Index n = channel.elements();
    require(v.size() == n, "echo: reflection vector length must equal N");
    require(h.rows() == n && h.cols() == n, "echo: target response must be N x N");
    require(x.rows() == channel.antennas(), "echo: waveform rows must equal M");
    const CMatrix phi_g = v.asDiagonal() * channel.g();
    return phi_g.transpose() * (h * (phi_g * x));
}

CMatrix simulate_echo(const Channel& channel, const CVector& v, const TargetModel& target,
                      const Waveform& waveform, double noise_power, double spacing_ratio,
                      Stream& rng) {
    require(is_unit_modulus(v), "echo: reflection coefficients must be unit modulus");
    require(noise_power >= 0.0, "echo: noise power must be non-negative");
    const CMatrix h = response_matrix(target, channel.elements(), spacing_ratio);
    CMatrix y = noiseless_echo(channel, v, h, waveform.x);
    if (noise_power > 0.0) y += rng.complex_normal_matrix(y.rows(), y.cols(), noise_power);
    return y;
}

}  // namespace irscrb

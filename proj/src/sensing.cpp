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

#include "irscrb/sensing.hpp"

namespace irscrb {

namespace {

constexpr double kEndfireTolerance = 1e-12;

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

const char* to_string(CrbStatus status) {
    switch (status) {
        case CrbStatus::estimable: return "estimable";
        case CrbStatus::rank_deficient: return "rank-deficient";
        case CrbStatus::endfire: return "endfire";
        case CrbStatus::no_information: return "no-information";
    }
    return "unknown";
}

EchoDirections echo_directions(const Channel& channel, const CVector& v, double theta, double spacing_ratio) {
    require(v.size() == channel.elements(), "echo_directions: reflection vector length must equal N");
    const CVector a = steering_vector(theta, channel.elements(), spacing_ratio);
    const CVector av = a.cwiseProduct(v);
    const CVector dav = element_indices(channel.elements()).cast<cd>().cwiseProduct(av);
    const cd scale(0.0, 2.0 * kPi * spacing_ratio * std::cos(theta));
    return {channel.g().transpose() * av, scale * (channel.g().transpose() * dav)};
}

FisherTerms fisher_terms(const EchoDirections& dirs, const CMatrix& rx) {
    const CMatrix bb = dirs.b * dirs.b.transpose();
    const CMatrix bb_dot = dirs.b_dot * dirs.b.transpose() + dirs.b * dirs.b_dot.transpose();
    FisherTerms t;
    t.a = (bb_dot * rx * bb_dot.adjoint()).trace().real();
    t.c = (bb * rx * bb_dot.adjoint()).trace();
    t.d = (bb * rx * bb.adjoint()).trace().real();
    return t;
}

PointFim fim_point(const Channel& channel, const CVector& v, const CMatrix& rx, double theta, cd alpha,
                   int dwell, double noise_power, double spacing_ratio) {
    require(rx.rows() == channel.antennas() && rx.cols() == channel.antennas(), "fim_point: R_x must be M x M");
    require(noise_power > 0.0, "fim_point: noise power must be positive");
    const FisherTerms t = fisher_terms(echo_directions(channel, v, theta, spacing_ratio), rx);
    const double k = 2.0 * dwell / noise_power;
    const cd cross = std::conj(alpha) * t.c;

    PointFim fim;
    fim.f(0, 0) = k * std::norm(alpha) * t.a;
    fim.f(0, 1) = fim.f(1, 0) = k * cross.real();
    fim.f(0, 2) = fim.f(2, 0) = k * (cd(0.0, 1.0) * cross).real();
    fim.f(1, 1) = fim.f(2, 2) = k * t.d;
    fim.f(1, 2) = fim.f(2, 1) = 0.0;
    return fim;
}

ReflectGeometry reflect_geometry(const Channel& channel, const CMatrix& rx, double theta, double spacing_ratio) {
    require(rx.rows() == channel.antennas() && rx.cols() == channel.antennas(), "reflect_geometry: R_x must be M x M");
    ReflectGeometry geo;
    geo.a = steering_vector(theta, channel.elements(), spacing_ratio);
    geo.d = element_indices(channel.elements());
    const CMatrix gta = channel.g().transpose() * geo.a.asDiagonal();  // G^T A
    geo.r1 = gta.adjoint() * gta;
    geo.r2 = gta.adjoint() * rx.conjugate() * gta;
    return geo;
}

double reflective_objective(const CVector& v, const CMatrix& r1, const CMatrix& r2, const RVector& d) {
    const CVector dv = d.cast<cd>().cwiseProduct(v);
    const CVector r1v = r1 * v;
    const CVector r2v = r2 * v;
    const double q1 = v.dot(r1v).real();
    const double q2 = v.dot(r2v).real();
    const double dd1 = dv.dot(r1 * dv).real();
    const double dd2 = dv.dot(r2 * dv).real();
    const double c1 = std::norm(dv.dot(r1v));
    const double c2 = std::norm(dv.dot(r2v));
    return q2 * (dd1 - safe_ratio(c1, q1)) + q1 * (dd2 - safe_ratio(c2, q2));
}

double crb_from_reflective(double objective, double theta, cd alpha, int dwell, double noise_power,
                           double spacing_ratio) {
    const double c = std::cos(theta);
    const double den = 8.0 * dwell * std::norm(alpha) * kPi * kPi * spacing_ratio * spacing_ratio * c * c * objective;
    return den > 0.0 ? noise_power / den : kInf;
}

CrbReport crb_point(const Channel& channel, const CVector& v, const CMatrix& rx, double theta, cd alpha,
                    int dwell, double noise_power, double spacing_ratio) {
    CrbReport report;
    report.channel_rank = channel.rank();
    const PointFim fim = fim_point(channel, v, rx, theta, alpha, dwell, noise_power, spacing_ratio);
    report.fim_determinant = fim.f.determinant();

    if (report.channel_rank < 2) {
        report.status = CrbStatus::rank_deficient;
        return report;
    }
    if (std::abs(std::cos(theta)) < kEndfireTolerance) {
        report.status = CrbStatus::endfire;
        return report;
    }

    // Schur complement of the nuisance block, in closed form.
    const FisherTerms t = fisher_terms(echo_directions(channel, v, theta, spacing_ratio), rx);
    const double info = 2.0 * dwell * std::norm(alpha) / noise_power * t.schur();
    if (!(info > 0.0) || !(t.d > 0.0)) {
        report.status = CrbStatus::no_information;
        return report;
    }
    report.value = 1.0 / info;
    report.estimable = true;
    report.status = CrbStatus::estimable;

    const ReflectGeometry geo = reflect_geometry(channel, rx, theta, spacing_ratio);
    report.reflective_form = crb_from_reflective(reflective_objective(v, geo.r1, geo.r2, geo.d), theta, alpha,
                                                 dwell, noise_power, spacing_ratio);
    return report;
}

CrbReport crb_extended(const Channel& channel, const CMatrix& rx, int dwell, double noise_power) {
    require(rx.rows() == channel.antennas() && rx.cols() == channel.antennas(), "crb_extended: R_x must be M x M");
    require(noise_power > 0.0 && dwell >= 1, "crb_extended: noise power and dwell must be positive");
    CrbReport report;
    report.channel_rank = channel.rank();
    const Eigen::Index n = channel.elements();
    if (report.channel_rank < n) {
        report.status = CrbStatus::rank_deficient;
        return report;
    }
    const CMatrix grg = channel.g() * rx * channel.g().adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(grg), Eigen::EigenvaluesOnly);
    const RVector& lambda = eig.eigenvalues();
    if (numerical_rank(lambda.cwiseMax(0.0)) < n || !(lambda.minCoeff() > 0.0)) {
        report.status = CrbStatus::no_information;
        return report;
    }
    const double tr_grg_inv = lambda.cwiseInverse().sum();
    const double tr_gg_inv = channel.singular_values().head(n).array().square().inverse().sum();
    report.value = noise_power / dwell * tr_grg_inv * tr_gg_inv;
    report.estimable = true;
    report.status = CrbStatus::estimable;
    return report;
}

RMatrix fim_extended_explicit(const Channel& channel, const CVector& v, const CMatrix& rx, int dwell,
                              double noise_power, int max_elements) {
    const Eigen::Index n = channel.elements();
    if (n > max_elements)
        throw SizeError("fim_extended_explicit: N exceeds the explicit-FIM guard");
    require(v.size() == n, "fim_extended_explicit: reflection vector length must equal N");

    // Phi^* G^* (.) G^T Phi^T with Phi = diag(v).
    const CMatrix pg = v.conjugate().asDiagonal() * channel.g().conjugate();
    const CMatrix k1 = pg * rx.transpose() * pg.adjoint();
    const CMatrix k2 = pg * pg.adjoint();

    const Eigen::Index nn = n * n;
    CMatrix kron(nn, nn);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = k1(i, j) * k2;

    const double scale = 2.0 * dwell / noise_power;
    RMatrix f(2 * nn, 2 * nn);
    f.topLeftCorner(nn, nn) = scale * kron.real();
    f.bottomRightCorner(nn, nn) = scale * kron.real();
    f.bottomLeftCorner(nn, nn) = scale * kron.imag();
    f.topRightCorner(nn, nn) = -scale * kron.imag();
    return f;
}

}  // namespace irscrb

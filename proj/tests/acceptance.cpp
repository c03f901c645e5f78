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

// Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.
//
//   acceptance [--only 3,5] [--expect-fail 10] [--threads N]
//
// Exit status counts failures that were not listed in --expect-fail, plus
// listed criteria that unexpectedly pass.

#include "irscrb/baselines.hpp"
#include "irscrb/estimate.hpp"
#include "irscrb/experiment.hpp"
#include "irscrb/opt_extended.hpp"
#include "irscrb/opt_point.hpp"
#include "irscrb/sdp.hpp"
#include "irscrb/sensing.hpp"
#include "irscrb/steering.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace irscrb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <typename... Args>
std::string strf(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

int g_threads = 1;

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

Scenario paper(int m = 8, int n = 8, double p0_dbm = 30.0) {
    Scenario s;
    s.antennas = m;
    s.elements = n;
    s.dwell = 256;
    s.tx_power = dbm_to_watts(p0_dbm);
    s.noise_power = dbm_to_watts(-120.0);
    s.rician_factor = 0.5;
    s.pathloss = {1e-3, 1.0, 2.5};
    return s;
}

CMatrix random_psd(Eigen::Index m, Stream& rng, double trace) {
    const CMatrix f = rng.complex_normal_matrix(m, m);
    CMatrix r = f * f.adjoint();
    return r * (trace / r.trace().real());
}

CMatrix random_unitary(Eigen::Index n, Stream& rng) {
    Eigen::HouseholderQR<CMatrix> qr(rng.complex_normal_matrix(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

// ---------------------------------------------------------------- 1

Outcome power_law_slope() {
    Stream rng(1, "acceptance-slope");
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Scenario s = paper();
        const Channel c = make_channel(s, rng);
        const CVector v = rng.unit_modulus_vector(8);
        const CMatrix rx = random_psd(8, rng, s.tx_power);
        const double theta = rng.uniform() * 2.4 - 1.2;
        const cd alpha(nominal_alpha(s), 0.0);
        const double at_p0 = crb_point(c, v, rx, theta, alpha, s.dwell, s.noise_power, s.spacing_ratio).value;
        const double at_2p0 = crb_point(c, v, 2.0 * rx, theta, alpha, s.dwell, s.noise_power, s.spacing_ratio).value;
        worst = std::max(worst, rel(at_2p0, at_p0 / 2.0));
    }
    // The optimized design on the paper scenario, evaluated at P0 and 2 P0.
    const Scenario s = paper();
    Stream crng(1, "channel");
    const Channel c = make_channel(s, crng);
    Stream drng(1, "design");
    const Algorithm1Trace t = algorithm1(s, c, 0.0, OptimizerParams{}, drng);
    const cd alpha(nominal_alpha(s), 0.0);
    const auto& f = t.final();
    const double at_p0 = crb_point(c, f.v, f.rx, 0.0, alpha, s.dwell, s.noise_power, s.spacing_ratio).value;
    const double at_2p0 = crb_point(c, f.v, 2.0 * f.rx, 0.0, alpha, s.dwell, s.noise_power, s.spacing_ratio).value;
    worst = std::max(worst, rel(at_2p0, at_p0 / 2.0));
    return {worst <= 1e-9, strf("max relative deviation %.2e over 101 designs (tol 1e-9)", worst)};
}

// ---------------------------------------------------------------- 2

Outcome rank_dichotomy() {
    Stream rng(2, "acceptance-rank");
    int rank1_inf = 0, full_finite = 0;
    for (int k = 0; k < 50; ++k) {
        const Channel c(1e-3 * rng.complex_normal_vector(8) * rng.complex_normal_vector(8).adjoint());
        const CrbReport r = crb_point(c, rng.unit_modulus_vector(8), random_psd(8, rng, 1.0), rng.uniform() - 0.5,
                                      cd(1e-5, 0), 256, 1e-15, 0.5);
        if (std::isinf(r.value) && !r.estimable && c.rank() == 1) ++rank1_inf;
    }
    Scenario s = paper();
    for (int k = 0; k < 50; ++k) {
        const Channel c = make_channel(s, rng);
        const CrbReport r = crb_point(c, rng.unit_modulus_vector(8), random_psd(8, rng, s.tx_power),
                                      rng.uniform() - 0.5, cd(nominal_alpha(s), 0), s.dwell, s.noise_power, 0.5);
        if (std::isfinite(r.value) && r.estimable && c.rank() >= 2) ++full_finite;
    }
    return {rank1_inf == 50 && full_finite == 50,
            strf("rank-1: %d/50 report +inf; rank>=2: %d/50 finite", rank1_inf, full_finite)};
}

// ---------------------------------------------------------------- 3

Outcome dual_form() {
    Stream rng(3, "acceptance-dual");
    double worst = 0.0;
    int missing = 0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + static_cast<int>(rng.uniform() * 7);
        const int m = 2 + static_cast<int>(rng.uniform() * 7);
        const Channel c(rng.complex_normal_matrix(n, m));
        const CrbReport r = crb_point(c, rng.unit_modulus_vector(n), random_psd(m, rng, 1.0), rng.uniform() * 2.4 - 1.2,
                                      rng.complex_normal(), 64, 0.1, 0.5);
        if (!r.reflective_form) {
            ++missing;
            continue;
        }
        worst = std::max(worst, rel(*r.reflective_form, r.value));
    }
    return {worst <= 1e-8 && missing == 0,
            strf("max relative disagreement %.2e over 1000 instances (tol 1e-8)", worst)};
}

// ---------------------------------------------------------------- 4

CVector stacked_mean(const Channel& c, const CVector& v, const CMatrix& x, double theta, cd alpha) {
    const CVector a = steering_vector(theta, c.elements(), 0.5);
    const CMatrix y = noiseless_echo(c, v, alpha * a * a.transpose(), x);
    return Eigen::Map<const CVector>(y.data(), y.size());
}

Outcome fim_oracle() {
    Stream rng(4, "acceptance-fim");
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Channel c(rng.complex_normal_matrix(2, 2));
        const CVector v = rng.unit_modulus_vector(2);
        const CMatrix rx = random_psd(2, rng, 1.0);
        const double theta = rng.uniform() * 2.0 - 1.0;
        const cd alpha = rng.complex_normal();
        const double noise = 0.5;
        const int dwell = 8;
        const CMatrix x = synthesize_waveform(rx, dwell).x;
        const double h = 1e-6, ha = 1e-6 * std::abs(alpha);
        CMatrix jac(x.rows() * x.cols(), 3);
        jac.col(0) = (stacked_mean(c, v, x, theta + h, alpha) - stacked_mean(c, v, x, theta - h, alpha)) / (2 * h);
        jac.col(1) = (stacked_mean(c, v, x, theta, alpha + ha) - stacked_mean(c, v, x, theta, alpha - ha)) / (2 * ha);
        jac.col(2) =
            (stacked_mean(c, v, x, theta, alpha + cd(0, ha)) - stacked_mean(c, v, x, theta, alpha - cd(0, ha))) /
            (2 * ha);
        const Eigen::Matrix3d oracle = (2.0 / noise) * (jac.adjoint() * jac).real();
        const Eigen::Matrix3d analytic = fim_point(c, v, rx, theta, alpha, dwell, noise, 0.5).f;
        worst = std::max(worst, (analytic - oracle).norm() / oracle.norm());
    }
    return {worst <= 1e-4, strf("max relative Frobenius error %.2e over 20 instances, M=N=2 (tol 1e-4)", worst)};
}

// ---------------------------------------------------------------- 5

Outcome extended_sdp() {
    Stream rng(5, "acceptance-ext-sdp");
    double worst = 0.0;
    int nonoptimal = 0;
    for (int k = 0; k < 20; ++k) {
        const Channel c(rng.complex_normal_matrix(4, 4));
        const double p0 = 1.0;
        const ExtendedSdpResult r = sdp_cross_check(c, p0);
        if (r.status != sdp::Status::optimal) ++nonoptimal;
        // min tr((G R G^H)^-1) over tr(R) <= P0 is (sum 1/sigma_i)^2 / P0.
        Eigen::JacobiSVD<CMatrix> svd(c.g());
        const double closed = std::pow(svd.singularValues().cwiseInverse().sum(), 2) / p0;
        worst = std::max(worst, rel(r.objective, closed));
        // The CRB the SDP design attains against the closed-form CRB_opt.
        const double crb_sdp = crb_extended(c, r.rx, 64, 1e-3).value;
        worst = std::max(worst, rel(crb_sdp, optimal_rx_extended(c, p0, 64, 1e-3).crb));
    }
    return {worst <= 1e-5 && nonoptimal == 0,
            strf("max relative gap %.2e over 20 channels, M=N=4 (tol 1e-5); non-optimal solves: %d", worst, nonoptimal)};
}

// ---------------------------------------------------------------- 6

Outcome jensen_ordering() {
    Stream rng(6, "acceptance-jensen");
    int violations = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 6, m = n + (k / 6) % 4;
        const Channel c(rng.complex_normal_matrix(n, m));
        if (isotropic_crb(c, 1.0, 64, 0.1) < optimal_rx_extended(c, 1.0, 64, 0.1).crb) ++violations;
    }
    double worst_eq = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int n = 2 + k % 6;
        const Channel c((0.1 + rng.uniform()) * random_unitary(n, rng));
        worst_eq = std::max(worst_eq, rel(isotropic_crb(c, 1.0, 64, 0.1), optimal_rx_extended(c, 1.0, 64, 0.1).crb));
    }
    return {violations == 0 && worst_eq <= 1e-9,
            strf("iso < opt on %d/100 channels; scaled-unitary equality error %.2e (tol 1e-9)", violations, worst_eq)};
}

// ---------------------------------------------------------------- 7

Outcome inverse_trace_property() {
    Stream rng(7, "acceptance-trace");
    int violations = 0, strict_failures = 0;
    double worst_diag = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + k % 7;
        const CMatrix f = rng.complex_normal_matrix(n, n);
        const CMatrix j = f * f.adjoint() + 1e-3 * CMatrix::Identity(n, n);
        const double lhs = j.inverse().trace().real();
        double rhs = 0.0;
        for (int i = 0; i < n; ++i) rhs += 1.0 / j(i, i).real();
        if (lhs < rhs * (1.0 - 1e-12)) ++violations;
        if (!(lhs > rhs * (1.0 + 1e-10))) ++strict_failures;  // off-diagonal mass is almost surely present
        const CMatrix d = CMatrix(j.diagonal().asDiagonal());
        worst_diag = std::max(worst_diag, rel(d.inverse().trace().real(), rhs));
    }
    return {violations == 0 && strict_failures == 0 && worst_diag <= 1e-10,
            strf("violations %d/1000, non-strict on non-diagonal %d, diagonal equality error %.2e (tol 1e-10)",
                 violations, strict_failures, worst_diag)};
}

// ---------------------------------------------------------------- 8

Outcome extended_efficiency() {
    Scenario s = paper(4, 4, 30.0);
    s.target = ExtendedTargetSpec{};
    MonteCarloOptions opt;
    opt.trials = 200;
    opt.threads = g_threads;
    const MseReport r = monte_carlo_mse(
        s,
        [&](const Channel& c, const TargetModel&, Stream& g) {
            return BeamformerPair{optimal_rx_extended(c, s.tx_power, s.dwell, s.noise_power).rx,
                                  g.unit_modulus_vector(c.elements())};
        },
        opt, Stream(1, "experiment").substream("monte-carlo"));
    return {r.failures == 0 && r.ratio >= 0.95 && r.ratio <= 1.05,
            strf("MSE/CRB = %.4f over %d trials (band [0.95, 1.05]); stderr/CRB %.4f", r.ratio, r.trials,
                 r.stderr_mse / r.crb)};
}

// ---------------------------------------------------------------- 9, 10

struct SweepPoint {
    double p0_dbm;
    MseReport report;
};

const std::vector<SweepPoint>& point_sweep() {
    static const std::vector<SweepPoint> sweep = [] {
        std::vector<SweepPoint> out;
        const OptimizerParams params;
        for (double p0 = -20.0; p0 <= 60.0; p0 += 10.0) {
            const Scenario s = paper(4, 4, p0);
            MonteCarloOptions opt;
            opt.trials = 100;
            opt.threads = g_threads;
            const MseReport r = monte_carlo_mse(
                s,
                [&](const Channel& c, const TargetModel& t, Stream& g) {
                    const Algorithm1Trace tr = algorithm1(s, c, std::get<PointTarget>(t).theta, params, g);
                    return BeamformerPair{tr.final().rx, tr.final().v};
                },
                opt, Stream(1, "experiment").substream("monte-carlo"));
            out.push_back({p0, r});
        }
        return out;
    }();
    return sweep;
}

double gap_db(const MseReport& r) { return 10.0 * std::log10(r.mse / r.crb); }

Outcome point_efficiency() {
    const SweepPoint& top = point_sweep().back();
    const double gap = gap_db(top.report);
    return {top.report.failures == 0 && std::abs(gap) <= 2.0,
            strf("at P0 = %.0f dBm: MSE %.3e, CRB %.3e, gap %+.2f dB (tol 2 dB), M=N=4, %d trials", top.p0_dbm,
                 top.report.mse, top.report.crb, gap, top.report.trials)};
}

Outcome low_snr_saturation() {
    const auto& sweep = point_sweep();
    // Efficiency threshold: lowest power from which every higher sweep point is within 2 dB of the bound.
    std::optional<double> threshold;
    for (auto it = sweep.rbegin(); it != sweep.rend(); ++it) {
        if (std::abs(gap_db(it->report)) > 2.0) break;
        threshold = it->p0_dbm;
    }
    if (!threshold) return {false, "no efficiency threshold found in the sweep"};
    const double target = kPi * kPi / 12.0;
    double worst = 0.0;
    std::string points;
    int counted = 0;
    for (const auto& p : sweep) {
        if (p.p0_dbm > *threshold - 30.0) continue;
        worst = std::max(worst, rel(p.report.mse, target));
        points += strf(" %.0f:%.3f", p.p0_dbm, p.report.mse);
        ++counted;
    }
    if (counted == 0) return {false, "sweep does not reach 30 dB below the threshold"};
    return {worst <= 0.2, strf("threshold %.0f dBm; MSE at P0 <= %.0f dBm [dBm:rad^2]%s vs pi^2/12 = %.3f; "
                               "worst deviation %.0f%% (tol 20%%)",
                               *threshold, *threshold - 30.0, points.c_str(), target, 100.0 * worst)};
}

// ---------------------------------------------------------------- 11

Algorithm1Trace paper_trace(std::uint64_t seed) {
    // Same streams as `irscrb run configs/convergence.yaml`.
    Scenario s = paper();
    s.seed = seed;
    const Stream base(seed, "experiment");
    Stream ch = base.substream("channel", 0);
    const Channel c = make_channel(s, ch);
    Stream tg = base.substream("target", 0);
    const auto target = std::get<PointTarget>(make_target(s, tg));
    Stream rng = base.substream("design", 0).substream("joint");
    return algorithm1(s, c, target.theta, OptimizerParams{}, rng);
}

Outcome convergence() {
    const Algorithm1Trace t = paper_trace(1);
    bool monotone = t.final().crb <= t.initial_crb;
    for (int l = 1; l < t.outer_iterations(); ++l)
        monotone = monotone && t.records[l].crb <= t.records[l - 1].crb * (1.0 + 1e-6);
    std::string spread;
    for (std::uint64_t seed = 2; seed <= 12; ++seed) spread += strf(" %d", paper_trace(seed).outer_iterations());
    return {monotone && t.converged && t.outer_iterations() <= 10,
            strf("seed 1: %d outer iterations, converged=%s, monotone=%s (limit 10); seeds 2-12 for reference:%s",
                 t.outer_iterations(), t.converged ? "yes" : "no", monotone ? "yes" : "no", spread.c_str())};
}

// ---------------------------------------------------------------- 12

Outcome scheme_ordering() {
    const auto parsed = cli::parse_config(R"(experiment:
  id: acceptance-ordering
  kind: crb-point
  schemes: [joint, snr-max, reflective-only, transmit-only]
  sweep: {axis: P0_dbm, values: [30]}
  realizations: 50
)");
    if (!parsed.ok()) return {false, "internal config rejected"};
    cli::ExperimentConfig cfg = *parsed.config;
    cfg.threads = g_threads;
    const auto rows = cli::run_experiment(cfg);
    std::map<std::string, double> mean;
    for (const auto& r : rows) mean[r.scheme] = r.crb;
    const double joint = mean.at("joint");
    bool ok = std::isfinite(joint);
    std::string detail = strf("mean CRB over 50 draws, M=N=8, P0=30 dBm: joint %.3e", joint);
    for (const char* s : {"snr-max", "reflective-only", "transmit-only"}) {
        ok = ok && joint <= mean.at(s);
        detail += strf(", %s %.3e", s, mean.at(s));
    }
    return {ok, detail};
}

// ---------------------------------------------------------------- 13

Outcome reflective_brute_force() {
    Stream rng(13, "acceptance-brute");
    const Scenario s = paper(8, 3);
    double worst = kInf;
    for (int k = 0; k < 10; ++k) {
        const Channel c = make_channel(s, rng);
        const CMatrix rx = random_psd(8, rng, s.tx_power);
        const double theta = k == 0 ? 0.0 : rng.uniform() * 2.0 - 1.0;
        const ReflectGeometry g = reflect_geometry(c, rx, theta, s.spacing_ratio);
        double grid = 0.0;
        CVector v(3);
        v(0) = 1.0;  // a common phase does not change the objective
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                v(1) = std::polar(1.0, 2 * kPi * i / 64);
                v(2) = std::polar(1.0, 2 * kPi * j / 64);
                grid = std::max(grid, reflective_objective(v, g.r1, g.r2, g.d));
            }
        Stream draws = rng.substream("draws", static_cast<std::uint64_t>(k));
        const ReflectiveResult r =
            solve_reflective(c, rx, theta, rng.unit_modulus_vector(3), s.spacing_ratio, OptimizerParams{}, draws);
        worst = std::min(worst, r.objective / grid);
    }
    return {worst >= 0.98, strf("worst SCA+randomization / 64-point grid ratio %.4f over 10 instances (min 0.98)", worst)};
}

// ---------------------------------------------------------------- 14

Outcome sdp_suite() {
    Stream rng(14, "acceptance-sdp");
    double worst_err = 0.0, worst_gap = 0.0;
    int nonoptimal = 0;
    auto note = [&](const sdp::Solution& s, double want) {
        if (!s.optimal()) ++nonoptimal;
        worst_err = std::max(worst_err, std::abs(s.primal_objective - want));
        worst_gap = std::max(worst_gap, s.gap);
    };
    for (int k = 0; k < 20; ++k) {
        const int n = 2 + k % 7;
        RMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.standard_normal();
        a = ((a + a.transpose()) / 2.0).eval();
        sdp::Problem p;
        p.sense = sdp::Sense::maximize;
        const int sb = p.add_block(n), tp = p.add_block(1), tm = p.add_block(1);
        p.objective[tp](0, 0) = 1.0;
        p.objective[tm](0, 0) = -1.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                sdp::Constraint c;
                c.terms.push_back({sb, sdp::entry_functional(n, i, j)});
                if (i == j) {
                    c.terms.push_back({tp, RMatrix::Ones(1, 1)});
                    c.terms.push_back({tm, -RMatrix::Ones(1, 1)});
                }
                c.rhs = a(i, j);
                p.add_constraint(c);
            }
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(a);
        note(sdp::solve(p), eig.eigenvalues().minCoeff());
    }
    {
        sdp::Problem p;
        const int b = p.add_block(2);
        p.objective[b](1, 1) = 1.0;
        p.add_constraint({{{b, sdp::entry_functional(2, 0, 0)}}, 1.0});
        p.add_constraint({{{b, sdp::entry_functional(2, 0, 1)}}, 2.0});
        note(sdp::solve(p), 4.0);
    }
    for (int n : {1, 2, 5, 12}) {
        sdp::Problem p;
        const int b = p.add_block(n);
        p.objective[b] = RMatrix::Identity(n, n);
        for (int i = 0; i < n; ++i) p.add_constraint({{{b, sdp::entry_functional(n, i, i)}}, 1.0});
        note(sdp::solve(p), n);
    }
    return {nonoptimal == 0 && worst_err <= 1e-7 && worst_gap <= 1e-7,
            strf("25 problems: max objective error %.2e (tol 1e-7), max gap %.2e (tol 1e-7), non-optimal %d",
                 worst_err, worst_gap, nonoptimal)};
}

std::set<int> parse_list(const char* text) {
    std::set<int> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only, expected_fail;
    g_threads = std::max(1u, std::thread::hardware_concurrency());
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            only = parse_list(argv[++i]);
        } else if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc) {
            expected_fail = parse_list(argv[++i]);
        } else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) {
            g_threads = std::max(1, std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--only LIST] [--expect-fail LIST] [--threads N]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"power-law slope", power_law_slope},
        {"rank dichotomy of the point bound", rank_dichotomy},
        {"dual-form point CRB agreement", dual_form},
        {"point FIM vs finite-difference oracle", fim_oracle},
        {"extended closed form vs SDP", extended_sdp},
        {"isotropic vs optimal extended ordering", jensen_ordering},
        {"inverse-trace vs inverse-diagonal property", inverse_trace_property},
        {"extended MLE efficiency", extended_efficiency},
        {"point MLE high-SNR efficiency", point_efficiency},
        {"point MLE low-SNR saturation", low_snr_saturation},
        {"alternating design convergence", convergence},
        {"scheme ordering", scheme_ordering},
        {"reflective design vs phase grid", reflective_brute_force},
        {"SDP solver suite", sdp_suite},
    };

    int unexpected = 0, passed = 0, failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool expected = expected_fail.count(id) > 0;
        const char* tag = o.pass ? (expected ? "XPASS" : "PASS") : (expected ? "FAIL (expected)" : "FAIL");
        std::printf("[%2d] %-15s %s: %s [%.1f s]\n", id, tag, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        (o.pass ? passed : failed)++;
        if (o.pass == expected) ++unexpected;
    }
    std::printf("acceptance: %d passed, %d failed, %d unexpected\n", passed, failed, unexpected);
    return unexpected == 0 ? 0 : 1;
}

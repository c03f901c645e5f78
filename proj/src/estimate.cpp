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

#include "irscrb/estimate.hpp"

#include "irscrb/sensing.hpp"
#include "irscrb/steering.hpp"

#include <atomic>
#include <optional>
#include <thread>
#include <vector>

namespace irscrb {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct LikelihoodKernel {
    CMatrix gt;   // G^T
    CMatrix yxh;  // Y X^H
    CMatrix xxh;  // X X^H
    CVector v;
    double spacing;

    CVector b(double theta) const {
        return gt * steering_vector(theta, v.size(), spacing).cwiseProduct(v);
    }

    double operator()(double theta) const {
        const CVector bt = b(theta);
        const double nb = bt.squaredNorm();
        const double energy = (bt.transpose() * xxh * bt.conjugate()).value().real();
        if (!(nb > 0.0) || !(energy > 0.0)) return 0.0;
        const cd corr = bt.dot(yxh * bt.conjugate());
        return std::norm(corr) / (nb * energy);
    }
};

LikelihoodKernel make_kernel(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v,
                             double spacing_ratio) {
    require(v.size() == channel.elements(), "mle: reflection vector length must equal N");
    require(x.rows() == channel.antennas() && y.rows() == channel.antennas() && y.cols() == x.cols(),
            "mle: echo and waveform dimensions disagree");
    return {channel.g().transpose(), y * x.adjoint(), x * x.adjoint(), v, spacing_ratio};
}

}  // namespace

double point_likelihood(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v, double theta,
                        double spacing_ratio) {
    return make_kernel(y, x, channel, v, spacing_ratio)(theta);
}

PointEstimate mle_point(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v,
                        double spacing_ratio, const GridParams& grid) {
    require(grid.step > 0.0 && grid.tolerance > 0.0, "mle_point: grid step and tolerance must be positive");
    const LikelihoodKernel f = make_kernel(y, x, channel, v, spacing_ratio);
    const double lo = -kPi / 2.0;
    const double hi = kPi / 2.0;
    const auto cells = static_cast<int>(std::ceil((hi - lo) / grid.step - 1e-9));

    PointEstimate est;
    double best_theta = 0.0;
    double best = -1.0;
    bool any_signal = false;
    for (int i = 0; i <= cells; ++i) {
        const double theta = std::min(hi, lo + i * grid.step);
        if (f.b(theta).squaredNorm() > 0.0) any_signal = true;
        const double val = f(theta);
        if (val > best) {
            best = val;
            best_theta = theta;
        }
    }
    if (!any_signal) return est;
    est.grid_objective = best;

    double a = std::max(lo, best_theta - grid.step);
    double b = std::min(hi, best_theta + grid.step);
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > grid.tolerance) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        }
    }
    const double mid = (a + b) / 2.0;
    const double fmid = f(mid);
    est.theta = fmid >= best ? mid : best_theta;
    est.objective = std::max(fmid, best);

    const CVector bt = f.b(est.theta);
    const double energy = (bt.transpose() * f.xxh * bt.conjugate()).value().real();
    est.alpha = bt.dot(f.yxh * bt.conjugate()) / (bt.squaredNorm() * energy);
    est.ok = true;
    return est;
}

CMatrix mle_extended(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v) {
    require(v.size() == channel.elements(), "mle_extended: reflection vector length must equal N");
    require(x.rows() == channel.antennas() && y.rows() == channel.antennas() && y.cols() == x.cols(),
            "mle_extended: echo and waveform dimensions disagree");
    const Eigen::Index n = channel.elements();
    if (channel.rank() < n) throw EstimabilityError("mle_extended: rank(G) < N");
    const CMatrix phi_g = v.asDiagonal() * channel.g();
    const CMatrix p = phi_g.transpose();  // G^T Phi, M x N
    const CMatrix q = phi_g * x;          // N x T
    if (numerical_rank(Eigen::JacobiSVD<CMatrix>(q).singularValues()) < n)
        throw EstimabilityError("mle_extended: waveform rank below N");

    Eigen::LLT<CMatrix> pp(p.adjoint() * p);
    Eigen::LLT<CMatrix> qq(q * q.adjoint());
    if (pp.info() != Eigen::Success || qq.info() != Eigen::Success)
        throw EstimabilityError("mle_extended: normal equations are singular");
    const CMatrix left = pp.solve(p.adjoint() * y * q.adjoint());
    return qq.solve(left.adjoint()).adjoint();
}

double pairwise_sum(const double* values, std::size_t count) {
    if (count == 0) return 0.0;
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += values[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

namespace {

struct Realization {
    Channel channel;
    TargetModel target;
    BeamformerPair design;
    Waveform waveform;
    CMatrix h;
    double crb;
};

Realization draw_realization(const Scenario& scenario, const Designer& designer, const Stream& base) {
    Stream channel_rng = base.substream("channel");
    Stream target_rng = base.substream("target");
    Stream design_rng = base.substream("design");
    Channel channel = make_channel(scenario, channel_rng);
    TargetModel target = make_target(scenario, target_rng);
    BeamformerPair design = designer(channel, target, design_rng);
    Waveform waveform = synthesize_waveform(design.rx, scenario.dwell);
    CMatrix h = response_matrix(target, channel.elements(), scenario.spacing_ratio);
    double crb = kInf;
    if (const auto* pt = std::get_if<PointTarget>(&target)) {
        crb = crb_point(channel, design.v, design.rx, pt->theta, pt->alpha, scenario.dwell, scenario.noise_power,
                        scenario.spacing_ratio)
                  .value;
    } else {
        crb = crb_extended(channel, design.rx, scenario.dwell, scenario.noise_power).value;
    }
    return {std::move(channel), std::move(target), std::move(design), std::move(waveform), std::move(h), crb};
}

struct TrialOutcome {
    bool ok = false;
    double error = 0.0;
    double crb = kInf;
};

TrialOutcome run_trial(const Scenario& scenario, const Realization& inst, const GridParams& grid, Stream& noise) {
    const CMatrix y = simulate_echo(inst.channel, inst.design.v, inst.target, inst.waveform, scenario.noise_power,
                                    scenario.spacing_ratio, noise);
    TrialOutcome out;
    out.crb = inst.crb;
    if (const auto* pt = std::get_if<PointTarget>(&inst.target)) {
        const PointEstimate est = mle_point(y, inst.waveform.x, inst.channel, inst.design.v, scenario.spacing_ratio, grid);
        if (!est.ok) return out;
        out.error = (est.theta - pt->theta) * (est.theta - pt->theta);
    } else {
        const CMatrix h_hat = mle_extended(y, inst.waveform.x, inst.channel, inst.design.v);
        out.error = (h_hat - inst.h).squaredNorm();
    }
    out.ok = true;
    return out;
}

}  // namespace

MseReport monte_carlo_mse(const Scenario& scenario, const Designer& designer, const MonteCarloOptions& options,
                          const Stream& rng) {
    require(options.trials >= 1, "monte_carlo_mse: need at least one trial");
    require(static_cast<bool>(designer), "monte_carlo_mse: designer is empty");
    scenario.validate();

    std::optional<Realization> fixed;
    if (!options.redraw) fixed = draw_realization(scenario, designer, rng.substream("realization"));

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(options.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < options.trials; t = next++) {
            const Stream trial = rng.substream("trial", static_cast<std::uint64_t>(t));
            Stream noise = trial.substream("noise");
            try {
                if (fixed) {
                    outcomes[static_cast<std::size_t>(t)] = run_trial(scenario, *fixed, options.grid, noise);
                } else {
                    const Realization inst = draw_realization(scenario, designer, trial);
                    outcomes[static_cast<std::size_t>(t)] = run_trial(scenario, inst, options.grid, noise);
                }
            } catch (const EstimabilityError&) {
                outcomes[static_cast<std::size_t>(t)].ok = false;
            } catch (const SynthesisError&) {
                outcomes[static_cast<std::size_t>(t)].ok = false;
            }
        }
    };
    const int threads = std::clamp(options.threads, 1, options.trials);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> errors;
    std::vector<double> crbs;
    MseReport report;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++report.failures;
            continue;
        }
        errors.push_back(o.error);
        crbs.push_back(o.crb);
    }
    report.trials = static_cast<int>(errors.size());
    if (report.trials == 0) {
        report.mse = kInf;
        return report;
    }
    const auto count = static_cast<double>(report.trials);
    report.mse = pairwise_sum(errors.data(), errors.size()) / count;
    report.crb = pairwise_sum(crbs.data(), crbs.size()) / count;
    report.ratio = report.mse / report.crb;
    if (report.trials > 1) {
        std::vector<double> dev(errors.size());
        for (std::size_t i = 0; i < errors.size(); ++i) dev[i] = (errors[i] - report.mse) * (errors[i] - report.mse);
        report.stderr_mse = std::sqrt(pairwise_sum(dev.data(), dev.size()) / (count - 1.0)) / std::sqrt(count);
    }
    return report;
}

}  // namespace irscrb

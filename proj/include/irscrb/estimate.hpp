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

#ifndef IRSCRB_ESTIMATE_HPP
#define IRSCRB_ESTIMATE_HPP

#include "irscrb/core.hpp"
#include "irscrb/random.hpp"
#include "irscrb/scene.hpp"

#include <functional>

namespace irscrb {

struct GridParams {
    double step = 0.2 * kPi / 180.0;  // coarse grid spacing, radians
    double tolerance = 1e-5;          // golden-section bracket width, radians
};

struct PointEstimate {
    bool ok = false;
    double theta = 0.0;
    cd alpha{0.0, 0.0};
    double objective = 0.0;       // concentrated likelihood at theta
    double grid_objective = 0.0;  // best value on the coarse grid
};

/// Concentrated likelihood |b^H Y X^H b*|^2 / (||b||^2 ||X^T b||^2) with b = G^T diag(a(theta)) v.
double point_likelihood(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v, double theta,
                        double spacing_ratio);

/// Grid search over [-pi/2, pi/2] refined by golden section; alpha in closed form.
/// ok = false when b vanishes everywhere on the grid.
PointEstimate mle_point(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v,
                        double spacing_ratio, const GridParams& grid = {});

/// Least-squares response matrix (P^H P)^-1 P^H Y Q^H (Q Q^H)^-1 with
/// P = G^T Phi and Q = Phi G X. Throws EstimabilityError on rank deficiency.
CMatrix mle_extended(const CMatrix& y, const CMatrix& x, const Channel& channel, const CVector& v);

struct MseReport {
    int trials = 0;    // successful trials
    int failures = 0;  // excluded trials
    double mse = 0.0;
    double crb = kInf;  // mean bound over the successful trials
    double ratio = 0.0;
    double stderr_mse = 0.0;  // sample std of the squared errors / sqrt(trials)
};

struct MonteCarloOptions {
    int trials = 100;
    bool redraw = false;  // fresh channel and target per trial
    int threads = 1;
    GridParams grid;
};

/// Produces the beamformers used for a realization (channel, target).
using Designer = std::function<BeamformerPair(const Channel&, const TargetModel&, Stream&)>;

/// Monte-Carlo MSE of the matching ML estimator against the CRB.
/// Noise is fresh per trial; channel and target are fixed unless options.redraw.
MseReport monte_carlo_mse(const Scenario& scenario, const Designer& designer, const MonteCarloOptions& options,
                          const Stream& rng);

/// Sum by recursive halving; result independent of thread scheduling.
double pairwise_sum(const double* values, std::size_t count);

}  // namespace irscrb

#endif  // IRSCRB_ESTIMATE_HPP

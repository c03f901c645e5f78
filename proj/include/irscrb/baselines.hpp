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

#ifndef IRSCRB_BASELINES_HPP
#define IRSCRB_BASELINES_HPP

#include "irscrb/core.hpp"
#include "irscrb/opt_point.hpp"
#include "irscrb/random.hpp"
#include "irscrb/scene.hpp"

namespace irscrb {

/// Echo-power maximization: IRS phases maximizing ||G^T A v||^2 (SDR plus
/// randomization), then maximum-ratio transmission along the resulting
/// effective channel. Rank-one R_x with trace P0.
BeamformerPair snr_max_design(const Channel& channel, double theta, double tx_power, double spacing_ratio,
                              const OptimizerParams& params, Stream& rng);

/// Isotropic transmission with optimized IRS phases.
BeamformerPair reflective_only(const Scenario& scenario, const Channel& channel, double theta,
                               const OptimizerParams& params, Stream& rng);

/// Random IRS phases with optimized transmit coherence.
BeamformerPair transmit_only(const Scenario& scenario, const Channel& channel, double theta,
                             const OptimizerParams& params, Stream& rng);

/// Joint design: the last iterate of the alternating optimizer.
BeamformerPair joint_design(const Scenario& scenario, const Channel& channel, double theta,
                            const OptimizerParams& params, Stream& rng);

/// (P0 / M) I.
CMatrix isotropic_extended(const Scenario& scenario);

/// Shared feasibility contract: tr(R_x) <= P0 (1 + 1e-8), R_x >= -1e-8 P0 / M, |v_n| = 1.
bool feasible(const BeamformerPair& pair, double tx_power);

}  // namespace irscrb

#endif  // IRSCRB_BASELINES_HPP

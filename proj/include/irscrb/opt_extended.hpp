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

#ifndef IRSCRB_OPT_EXTENDED_HPP
#define IRSCRB_OPT_EXTENDED_HPP

#include "irscrb/core.hpp"
#include "irscrb/scene.hpp"
#include "irscrb/sdp.hpp"

namespace irscrb {

/// Inverse-amplitude split p_i = P0 s_i^-1 / sum_k s_k^-1 of the budget over
/// channel modes with singular values s. Throws EstimabilityError if any s_i <= 0.
RVector power_allocation(const RVector& singular_values, double tx_power);

struct ExtendedDesign {
    CMatrix rx;
    double crb = kInf;
};

/// Closed-form coherence minimizing the response-matrix bound. No IRS phases
/// appear anywhere: the bound does not depend on them. Requires rank(G) = N <= M.
ExtendedDesign optimal_rx_extended(const Channel& channel, double tx_power, int dwell, double noise_power);

/// Bound under isotropic transmission R = (P0 / M) I.
double isotropic_crb(const Channel& channel, double tx_power, int dwell, double noise_power);

struct ExtendedSdpResult {
    CMatrix rx;
    double objective = 0.0;  // min tr((G R G^H)^-1) in original units
    sdp::Status status = sdp::Status::max_iter;
    int iterations = 0;
};

/// Numerical solution of  min tr((G R G^H)^-1)  s.t. tr(R) <= P0, R >= 0
/// through the epigraph [[U, I], [I, G R G^H]] >= 0. Validation path for the closed form.
ExtendedSdpResult sdp_cross_check(const Channel& channel, double tx_power, const sdp::Settings& settings = {});

}  // namespace irscrb

#endif  // IRSCRB_OPT_EXTENDED_HPP

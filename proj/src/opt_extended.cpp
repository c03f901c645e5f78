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

#include "irscrb/opt_extended.hpp"

namespace irscrb {

namespace {

void require_full_row_rank(const Channel& channel, const char* where) {
    if (channel.antennas() < channel.elements() || channel.rank() < channel.elements())
        throw EstimabilityError(std::string(where) + ": response matrix not estimable, need rank(G) = N <= M");
}

}  // namespace

RVector power_allocation(const RVector& singular_values, double tx_power) {
    require(tx_power > 0.0, "power_allocation: transmit power must be positive");
    require(singular_values.size() > 0, "power_allocation: empty spectrum");
    if (!(singular_values.minCoeff() > 0.0))
        throw EstimabilityError("power_allocation: every singular value must be positive");
    const RVector inv = singular_values.cwiseInverse();
    return tx_power * inv / inv.sum();
}

ExtendedDesign optimal_rx_extended(const Channel& channel, double tx_power, int dwell, double noise_power) {
    require(dwell >= 1 && noise_power > 0.0, "optimal_rx_extended: dwell and noise power must be positive");
    require_full_row_rank(channel, "optimal_rx_extended");
    const Eigen::Index n = channel.elements();
    const RVector s = channel.singular_values().head(n);
    const RVector p = power_allocation(s, tx_power);
    const CMatrix q = channel.right().leftCols(n);

    ExtendedDesign out;
    out.rx = hermitian_part(q * p.cast<cd>().asDiagonal() * q.adjoint());
    const double inv1 = s.cwiseInverse().sum();
    const double inv2 = s.array().square().inverse().sum();
    out.crb = noise_power * inv1 * inv1 * inv2 / (tx_power * dwell);
    return out;
}

double isotropic_crb(const Channel& channel, double tx_power, int dwell, double noise_power) {
    require(tx_power > 0.0 && dwell >= 1 && noise_power > 0.0, "isotropic_crb: budgets must be positive");
    require_full_row_rank(channel, "isotropic_crb");
    const RVector s = channel.singular_values().head(channel.elements());
    const double inv2 = s.array().square().inverse().sum();
    return static_cast<double>(channel.antennas()) * noise_power * inv2 * inv2 / (tx_power * dwell);
}

ExtendedSdpResult sdp_cross_check(const Channel& channel, double tx_power, const sdp::Settings& settings) {
    require(tx_power > 0.0, "sdp_cross_check: transmit power must be positive");
    require_full_row_rank(channel, "sdp_cross_check");
    const auto n = static_cast<int>(channel.elements());
    const auto m = static_cast<int>(channel.antennas());
    const double s1 = channel.singular_values()(0);
    const CMatrix g = channel.g() / s1;

    // Blocks: K = [[U, W], [W^H, Y]] (complex 2N), R / P0 (complex M), power slack.
    sdp::Problem p;
    const int kb = p.add_block(4 * n);
    const int rb = p.add_block(2 * m);
    const int wb = p.add_block(1);

    auto unit = [](int dim, int i, int j) {
        CMatrix e = CMatrix::Zero(dim, dim);
        e(i, j) = 1.0;
        return e;
    };
    const cd j_unit(0.0, 1.0);

    CMatrix upper = CMatrix::Zero(2 * n, 2 * n);
    upper.topLeftCorner(n, n).setIdentity();
    p.objective[kb] = sdp::complex_functional(upper);

    // K(i, N + j) = delta_ij, so W = I.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const CMatrix e = unit(2 * n, n + j, i);  // Re tr(e K) = Re K(i, N + j)
            p.add_constraint({{{kb, sdp::complex_functional(e)}}, i == j ? 1.0 : 0.0});
            p.add_constraint({{{kb, sdp::complex_functional(-j_unit * e)}}, 0.0});
        }

    // Y = G R G^H, entrywise on the upper triangle.
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const CMatrix ek = unit(2 * n, n + j, n + i);
            const CMatrix er = g.adjoint() * unit(n, j, i) * g;  // tr(er R) = (G R G^H)(i, j)
            p.add_constraint({{{kb, sdp::complex_functional(ek)}, {rb, -sdp::complex_functional(er)}}, 0.0});
            if (i != j)
                p.add_constraint({{{kb, sdp::complex_functional(-j_unit * ek)}, {rb, -sdp::complex_functional(-j_unit * er)}},
                                  0.0});
        }

    p.add_constraint({{{rb, RMatrix::Identity(2 * m, 2 * m) / 2.0}, {wb, RMatrix::Identity(1, 1)}}, 1.0});

    const sdp::Solution sol = sdp::solve(p, settings);
    ExtendedSdpResult out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.rx = tx_power * sdp::extract_hermitian<double>(sol.x[rb]);
    out.objective = sol.primal_objective / (s1 * s1 * tx_power);
    return out;
}

}  // namespace irscrb

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

#include "common.hpp"

#include "irscrb/sdp.hpp"

#include <doctest.h>

#include <sstream>

using namespace irscrb;
using testing::rel_err;

namespace {

RMatrix random_symmetric(int n, Stream& rng) {
    RMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.standard_normal();
    return (a + a.transpose()) / 2.0;
}

// max t  s.t.  A - t I = S, S >= 0, written over blocks {S (n x n), t+ (1x1), t- (1x1)}.
sdp::Problem min_eigenvalue_problem(const RMatrix& a) {
    const int n = static_cast<int>(a.rows());
    sdp::Problem p;
    p.sense = sdp::Sense::maximize;
    const int s = p.add_block(n);
    const int tp = p.add_block(1);
    const int tm = p.add_block(1);
    p.objective[tp](0, 0) = 1.0;
    p.objective[tm](0, 0) = -1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            sdp::Constraint c;
            c.terms.push_back({s, sdp::entry_functional(n, i, j)});
            if (i == j) {
                c.terms.push_back({tp, RMatrix::Ones(1, 1)});
                c.terms.push_back({tm, -RMatrix::Ones(1, 1)});
            }
            c.rhs = a(i, j);
            p.add_constraint(c);
        }
    return p;
}

sdp::Problem schur_2x2_problem() {
    // min x  s.t.  X = [[1, 2], [2, x]] >= 0
    sdp::Problem p;
    const int b = p.add_block(2);
    p.objective[b](1, 1) = 1.0;
    p.add_constraint({{{b, sdp::entry_functional(2, 0, 0)}}, 1.0});
    p.add_constraint({{{b, sdp::entry_functional(2, 0, 1)}}, 2.0});
    return p;
}

sdp::Problem diagonal_trace_problem(int n) {
    sdp::Problem p;
    const int b = p.add_block(n);
    p.objective[b] = RMatrix::Identity(n, n);
    for (int i = 0; i < n; ++i) p.add_constraint({{{b, sdp::entry_functional(n, i, i)}}, 1.0});
    return p;
}

double complementarity(const sdp::Solution& s) {
    double worst = 0.0;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
        const double bound = s.x[k].trace() * s.z[k].trace() / static_cast<double>(s.x[k].rows());
        // Unit floor: a block whose slack vanishes at the optimum would otherwise divide 0 by 0.
        worst = std::max(worst, (s.x[k] * s.z[k]).norm() / std::max(bound, 1.0));
    }
    return worst;
}

void check_solution_invariants(const sdp::Solution& s) {
    REQUIRE(s.optimal());
    CHECK(s.gap <= 1e-7);
    CHECK(s.primal_residual <= 1e-7);
    for (const auto& x : s.x) {
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(x);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * std::max(x.trace(), 1e-300));
    }
    CHECK(complementarity(s) <= 1e-6);
}

}  // namespace

TEST_CASE("minimum eigenvalue LMI") {
    Stream rng(31, "lmi");
    for (int k = 0; k < 20; ++k) {
        const RMatrix a = random_symmetric(2 + k % 6, rng);
        const sdp::Solution s = sdp::solve(min_eigenvalue_problem(a));
        check_solution_invariants(s);
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(a);
        CHECK(std::abs(s.primal_objective - eig.eigenvalues().minCoeff()) <= 1e-7);
    }
}

TEST_CASE("2x2 Schur complement") {
    const sdp::Solution s = sdp::solve(schur_2x2_problem());
    check_solution_invariants(s);
    CHECK(std::abs(s.primal_objective - 4.0) <= 1e-7);
    CHECK(std::abs(s.x[0](1, 1) - 4.0) <= 1e-6);
}

TEST_CASE("diagonal-constrained trace") {
    for (int n : {1, 2, 5, 12}) {
        const sdp::Solution s = sdp::solve(diagonal_trace_problem(n));
        check_solution_invariants(s);
        CHECK(std::abs(s.primal_objective - n) <= 1e-7 * n);
    }
}

TEST_CASE("weak duality along the iterates") {
    Stream rng(32, "duality");
    sdp::Settings settings;
    settings.record_history = true;
    for (int k = 0; k < 10; ++k) {
        const sdp::Solution s = sdp::solve(min_eigenvalue_problem(random_symmetric(5, rng)), settings);
        REQUIRE(s.optimal());
        REQUIRE(!s.history.empty());
        for (const auto& it : s.history) {
            // Only feasible iterates carry a duality certificate.
            if (it.primal_residual > 1e-9 || it.dual_residual > 1e-9) continue;
            const double scale = 1.0 + std::abs(it.primal_objective) + std::abs(it.dual_objective);
            // Maximization: the primal value must not exceed the dual bound.
            CHECK(it.dual_objective - it.primal_objective >= -1e-9 * scale);
        }
    }
}

TEST_CASE("dependent constraints are presolved") {
    sdp::Problem p = diagonal_trace_problem(3);
    const int b = 0;
    // tr(X) = 3 follows from the diagonal constraints.
    p.add_constraint({{{b, RMatrix::Identity(3, 3)}}, 3.0});
    const sdp::Solution s = sdp::solve(p);
    check_solution_invariants(s);
    CHECK(s.dropped_constraints == 1);
    CHECK(std::abs(s.primal_objective - 3.0) <= 1e-7);
}

TEST_CASE("infeasible and unbounded problems") {
    SUBCASE("negative diagonal") {
        sdp::Problem p;
        const int b = p.add_block(2);
        p.objective[b] = RMatrix::Identity(2, 2);
        p.add_constraint({{{b, sdp::entry_functional(2, 0, 0)}}, -1.0});
        const sdp::Solution s = sdp::solve(p);
        CHECK(s.status == sdp::Status::infeasible);
    }
    SUBCASE("unbounded diagonal") {
        sdp::Problem p;
        const int b = p.add_block(2);
        p.objective[b](0, 0) = -1.0;
        p.add_constraint({{{b, sdp::entry_functional(2, 0, 1)}}, 0.0});
        const sdp::Solution s = sdp::solve(p);
        CHECK(s.status == sdp::Status::unbounded);
    }
    SUBCASE("inconsistent duplicate rows") {
        sdp::Problem p = diagonal_trace_problem(2);
        p.add_constraint({{{0, sdp::entry_functional(2, 0, 0)}}, 2.0});
        CHECK(sdp::solve(p).status == sdp::Status::infeasible);
    }
}

TEST_CASE("malformed problems") {
    sdp::Problem p;
    const int b = p.add_block(2);
    RMatrix bad(2, 2);
    bad << 1, 2, 0, 1;
    p.add_constraint({{{b, bad}}, 1.0});
    CHECK_THROWS_AS(sdp::solve(p), ContractError);

    sdp::Problem q;
    q.add_block(2);
    q.add_constraint({{{0, RMatrix::Identity(3, 3)}}, 1.0});
    CHECK_THROWS_AS(sdp::solve(q), ContractError);

    sdp::Problem r;
    r.add_block(2);
    r.add_constraint({{{4, RMatrix::Identity(2, 2)}}, 1.0});
    CHECK_THROWS_AS(sdp::solve(r), ContractError);
}

TEST_CASE("Hermitian embedding") {
    Stream rng(33, "embed");
    SUBCASE("identity") {
        CHECK((sdp::embed_hermitian<double>(CMatrix::Identity(3, 3)) - RMatrix::Identity(6, 6)).norm() == 0.0);
    }
    SUBCASE("skew example") {
        CMatrix h(2, 2);
        h << 0.0, cd(0, 1), cd(0, -1), 0.0;  // eigenvalues -1, 1
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(sdp::embed_hermitian<double>(h));
        RVector want(4);
        want << -1, -1, 1, 1;
        CHECK((eig.eigenvalues() - want).norm() < 1e-12);
    }
    SUBCASE("random: spectrum, PSD, trace, round trip") {
        for (int k = 0; k < 50; ++k) {
            const int n = 1 + k % 6;
            const CMatrix f = rng.complex_normal_matrix(n, n);
            const CMatrix h = hermitian_part(f);
            const RMatrix e = sdp::embed_hermitian<double>(h);
            CHECK((e - e.transpose()).norm() == 0.0);
            CHECK(std::abs(e.trace() - 2.0 * h.trace().real()) < 1e-12);
            Eigen::SelfAdjointEigenSolver<CMatrix> he(h);
            Eigen::SelfAdjointEigenSolver<RMatrix> ee(e);
            RVector doubled(2 * n);
            for (int i = 0; i < n; ++i) doubled(2 * i) = doubled(2 * i + 1) = he.eigenvalues()(i);
            CHECK((ee.eigenvalues() - doubled).norm() <= 1e-9 * std::max(1.0, h.norm()));
            CHECK(rel_err(sdp::extract_hermitian<double>(e), h) < 1e-12);

            const CMatrix psd = f * f.adjoint();
            Eigen::SelfAdjointEigenSolver<RMatrix> pe(sdp::embed_hermitian<double>(psd));
            CHECK(pe.eigenvalues().minCoeff() >= -1e-10 * psd.norm());

            // <complex_functional(A), embed(V)> = Re tr(A V)
            const CMatrix a = rng.complex_normal_matrix(n, n);
            const double lhs = (sdp::complex_functional(a).array() * e.array()).sum();
            CHECK(std::abs(lhs - (a * h).trace().real()) <= 1e-10 * (1.0 + a.norm() * h.norm()));
        }
    }
    SUBCASE("non-Hermitian input") {
        CMatrix h(2, 2);
        h << 1.0, 2.0, 0.0, 1.0;
        CHECK_THROWS_AS(sdp::embed_hermitian<double>(h), ContractError);
    }
}

TEST_CASE("sparse dump") {
    std::ostringstream out;
    sdp::write_sparse(out, schur_2x2_problem());
    const std::string text = out.str();
    CHECK(text.find("# blocks 2") != std::string::npos);
    CHECK(text.find("# rhs 1 2") != std::string::npos);
    CHECK(text.find("0 1 2 2 1") != std::string::npos);  // objective picks X(2,2)
    CHECK(text.find("2 1 1 2 0.5") != std::string::npos);  // symmetric off-diagonal functional
}

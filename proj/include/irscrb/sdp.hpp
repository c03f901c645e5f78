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

#ifndef IRSCRB_SDP_HPP
#define IRSCRB_SDP_HPP

#include "irscrb/core.hpp"

#include <iosfwd>
#include <vector>

/// Dense primal-dual interior-point solver for small semidefinite programs
///
///   (P)  min <C, X>  s.t.  <A_k, X> = b_k,  X >= 0 (block diagonal)
///   (D)  max b^T y   s.t.  Z = C - sum_k y_k A_k >= 0
///
/// Search directions use Nesterov-Todd scaling with a Mehrotra
/// predictor-corrector. Complex Hermitian variables enter through the real
/// embedding [[Re, -Im], [Im, Re]] (see embed_hermitian / complex_functional).
namespace irscrb::sdp {

using BlockMatrix = std::vector<RMatrix>;

struct Term {
    int block = 0;
    RMatrix coefficient;  // symmetric, block-sized
};

/// sum over terms of <coefficient, X_block> == rhs
struct Constraint {
    std::vector<Term> terms;
    double rhs = 0.0;
};

enum class Sense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, max_iter };

const char* to_string(Status status);

struct Problem {
    std::vector<int> blocks;
    BlockMatrix objective;  // one symmetric matrix per block
    std::vector<Constraint> constraints;
    Sense sense = Sense::minimize;

    /// Appends a block with zero objective and returns its index.
    int add_block(int dim);
    /// Appends `constraint` and returns its index.
    int add_constraint(Constraint constraint);
    /// Throws ContractError on dimension mismatch or asymmetric data.
    void validate() const;
};

struct Settings {
    double gap_tolerance = 1e-8;     // target for gap and residuals
    double accept_tolerance = 1e-7;  // still reported optimal at exit
    int max_iterations = 200;
    double presolve_tolerance = 1e-10;
    double complementarity_tolerance = 1e-6;  // ||X Z|| relative to tr(X) tr(Z) / n
    bool record_history = false;
};

struct IterateRecord {
    int iteration = 0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double mu = 0.0;
};

struct Solution {
    BlockMatrix x;
    BlockMatrix z;
    RVector y;
    Status status = Status::max_iter;
    double primal_objective = 0.0;  // in the problem's own sense
    double dual_objective = 0.0;
    double gap = 0.0;               // |p - d| / (1 + |p| + |d|)
    double primal_residual = 0.0;   // ||b - A(X)|| / (1 + ||b||)
    double dual_residual = 0.0;     // ||C - A^T y - Z|| / (1 + ||C||)
    int iterations = 0;
    int dropped_constraints = 0;
    std::vector<IterateRecord> history;

    bool optimal() const { return status == Status::optimal; }
};

Solution solve(const Problem& problem, const Settings& settings = {});

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> embed_hermitian(
    const Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>& h, Real tolerance = Real(1e-10)) {
    if (h.rows() != h.cols()) throw ContractError("embed_hermitian: matrix must be square");
    const Real scale = std::max<Real>(h.norm(), std::numeric_limits<Real>::min());
    if ((h - h.adjoint()).norm() > tolerance * scale) throw ContractError("embed_hermitian: matrix is not Hermitian");
    const Eigen::Index n = h.rows();
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> out(2 * n, 2 * n);
    out << h.real(), -h.imag(), h.imag(), h.real();
    return out;
}

/// Inverse of embed_hermitian. Accepts any real symmetric 2n x 2n matrix and
/// returns the Hermitian matrix whose embedding is closest to it, which keeps
/// PSD-ness and every functional built with complex_functional.
template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> extract_hermitian(
    const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>& x) {
    if (x.rows() != x.cols() || x.rows() % 2 != 0) throw ContractError("extract_hermitian: need 2n x 2n input");
    const Eigen::Index n = x.rows() / 2;
    const auto re = ((x.topLeftCorner(n, n) + x.bottomRightCorner(n, n)) / Real(2)).eval();
    const auto im = ((x.bottomLeftCorner(n, n) - x.topRightCorner(n, n)) / Real(2)).eval();
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> h(n, n);
    h.real() = re;
    h.imag() = im;
    return ((h + h.adjoint()) / Real(2)).eval();
}

/// Coefficient F on an embedded complex block such that <F, embed(V)> = Re tr(A V)
/// for every Hermitian V. A need not be Hermitian.
RMatrix complex_functional(const CMatrix& a);

/// Symmetric E with <E, X> = X(i, j) for symmetric X.
RMatrix entry_functional(int dim, int i, int j);

/// Debug dump, one line per nonzero upper-triangular entry:
///   <matrix> <block> <i> <j> <value>
/// matrix 0 is the objective (minimization sense), 1..m the constraints; indices
/// are 1-based. Header lines start with '#': block sizes, then the right-hand side.
void write_sparse(std::ostream& out, const Problem& problem);

}  // namespace irscrb::sdp

#endif  // IRSCRB_SDP_HPP

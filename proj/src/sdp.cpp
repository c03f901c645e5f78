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

#include "irscrb/sdp.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace irscrb::sdp {

namespace {

struct Entry {
    int row;  // index into the reduced constraint list
    RMatrix a;
};

/// Reduced, scaled, minimization-sense copy of the problem the iterations run on.
struct Scaled {
    std::vector<int> dims;
    int total_dim = 0;
    BlockMatrix c;
    std::vector<std::vector<Entry>> entries;  // per block
    RVector b;
    int m = 0;
};

/// Per-block Nesterov-Todd scaling data: W = G G^T with G = L Q D^{-1/2}.
struct Scaling {
    Eigen::LLT<RMatrix> chol_x;
    RMatrix q;
    RVector d;
    RMatrix g;
    RMatrix w;
};

double inner(const BlockMatrix& a, const BlockMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
    return s;
}

RVector apply_a(const Scaled& p, const BlockMatrix& x) {
    RVector out = RVector::Zero(p.m);
    for (std::size_t blk = 0; blk < p.entries.size(); ++blk)
        for (const auto& e : p.entries[blk]) out(e.row) += e.a.cwiseProduct(x[blk]).sum();
    return out;
}

BlockMatrix apply_at(const Scaled& p, const RVector& y) {
    BlockMatrix out(p.dims.size());
    for (std::size_t blk = 0; blk < p.dims.size(); ++blk) {
        out[blk] = RMatrix::Zero(p.dims[blk], p.dims[blk]);
        for (const auto& e : p.entries[blk]) out[blk] += y(e.row) * e.a;
    }
    return out;
}

BlockMatrix axpy(const BlockMatrix& x, double alpha, const BlockMatrix& dx) {
    BlockMatrix out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * dx[i];
    return out;
}

RMatrix symmetrize(const RMatrix& a) { return (a + a.transpose()) / 2.0; }

double block_norm(const BlockMatrix& a) {
    double s = 0.0;
    for (const auto& blk : a) s += blk.squaredNorm();
    return std::sqrt(s);
}

/// Largest step alpha with X + alpha dX still PSD (inf if dX keeps it PSD).
double max_step(const Eigen::LLT<RMatrix>& chol, const RMatrix& dx) {
    const auto& l = chol.matrixL();
    RMatrix s = l.solve(dx);
    s = l.solve(s.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(symmetrize(s), Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step(const BlockMatrix& x, const BlockMatrix& dx) {
    double alpha = kInf;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Eigen::LLT<RMatrix> chol(x[i]);
        if (chol.info() != Eigen::Success) return 0.0;
        alpha = std::min(alpha, max_step(chol, dx[i]));
    }
    return alpha;
}

struct Metrics {
    double pobj = 0.0, dobj = 0.0, gap = 0.0, pinf = 0.0, dinf = 0.0;
};

}  // namespace

const char* to_string(Status status) {
    switch (status) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::max_iter: return "max-iter";
    }
    return "unknown";
}

int Problem::add_block(int dim) {
    require(dim > 0, "sdp: block dimension must be positive");
    blocks.push_back(dim);
    objective.push_back(RMatrix::Zero(dim, dim));
    return static_cast<int>(blocks.size()) - 1;
}

int Problem::add_constraint(Constraint constraint) {
    constraints.push_back(std::move(constraint));
    return static_cast<int>(constraints.size()) - 1;
}

void Problem::validate() const {
    require(!blocks.empty(), "sdp: problem has no blocks");
    require(objective.size() == blocks.size(), "sdp: objective must have one matrix per block");
    auto check = [&](const RMatrix& a, int blk, const char* what) {
        require(blk >= 0 && blk < static_cast<int>(blocks.size()), std::string("sdp: bad block index in ") + what);
        require(blocks[blk] > 0, "sdp: block dimension must be positive");
        if (a.size() == 0) return;
        require(a.rows() == blocks[blk] && a.cols() == blocks[blk], std::string("sdp: dimension mismatch in ") + what);
        require((a - a.transpose()).norm() <= 1e-12 * std::max(1.0, a.norm()), std::string("sdp: asymmetric ") + what);
    };
    for (std::size_t i = 0; i < blocks.size(); ++i) check(objective[i], static_cast<int>(i), "objective");
    for (const auto& con : constraints)
        for (const auto& t : con.terms) check(t.coefficient, t.block, "constraint");
}

RMatrix complex_functional(const CMatrix& a) {
    require(a.rows() == a.cols(), "complex_functional: matrix must be square");
    return embed_hermitian<double>(hermitian_part(a)) / 2.0;
}

RMatrix entry_functional(int dim, int i, int j) {
    RMatrix e = RMatrix::Zero(dim, dim);
    if (i == j) {
        e(i, i) = 1.0;
    } else {
        e(i, j) = 0.5;
        e(j, i) = 0.5;
    }
    return e;
}

void write_sparse(std::ostream& out, const Problem& problem) {
    const double sign = problem.sense == Sense::maximize ? -1.0 : 1.0;
    out << "# blocks";
    for (int d : problem.blocks) out << ' ' << d;
    out << "\n# rhs";
    for (const auto& c : problem.constraints) out << ' ' << c.rhs;
    out << '\n';
    auto dump = [&](std::size_t matrix, int blk, const RMatrix& a, double scale) {
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = i; j < a.cols(); ++j)
                if (a(i, j) != 0.0)
                    out << matrix << ' ' << blk + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << scale * a(i, j) << '\n';
    };
    for (std::size_t blk = 0; blk < problem.objective.size(); ++blk)
        dump(0, static_cast<int>(blk), problem.objective[blk], sign);
    for (std::size_t k = 0; k < problem.constraints.size(); ++k)
        for (const auto& t : problem.constraints[k].terms) dump(k + 1, t.block, t.coefficient, 1.0);
}

Solution solve(const Problem& problem, const Settings& settings) {
    problem.validate();
    const auto nblocks = problem.blocks.size();
    const double sense = problem.sense == Sense::maximize ? -1.0 : 1.0;
    const auto m0 = static_cast<int>(problem.constraints.size());

    Solution sol;

    // Minimization-sense objective, zero-filled.
    BlockMatrix c0(nblocks);
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        const int d = problem.blocks[blk];
        c0[blk] = problem.objective[blk].size() == 0 ? RMatrix::Zero(d, d) : RMatrix(sense * problem.objective[blk]);
    }

    // Row norms; empty rows must have zero right-hand side.
    RVector rownorm(m0);
    RVector b0(m0);
    std::vector<int> candidates;
    for (int k = 0; k < m0; ++k) {
        double s = 0.0;
        for (const auto& t : problem.constraints[k].terms) s += t.coefficient.squaredNorm();
        rownorm(k) = std::sqrt(s);
        b0(k) = problem.constraints[k].rhs;
        if (rownorm(k) > 0.0) {
            candidates.push_back(k);
        } else if (std::abs(b0(k)) > settings.presolve_tolerance) {
            sol.status = Status::infeasible;
            return sol;
        }
    }

    // Presolve: keep a maximal linearly independent subset of constraints.
    std::vector<Eigen::Index> offsets(nblocks + 1, 0);
    for (std::size_t blk = 0; blk < nblocks; ++blk)
        offsets[blk + 1] = offsets[blk] + static_cast<Eigen::Index>(problem.blocks[blk]) * problem.blocks[blk];
    RMatrix at = RMatrix::Zero(offsets[nblocks], static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const int k = candidates[c];
        for (const auto& t : problem.constraints[k].terms)
            at.col(static_cast<Eigen::Index>(c)).segment(offsets[t.block], t.coefficient.size()) +=
                t.coefficient.reshaped() / rownorm(k);
    }
    std::vector<int> kept;
    if (!candidates.empty()) {
        Eigen::ColPivHouseholderQR<RMatrix> qr(at);
        qr.setThreshold(settings.presolve_tolerance);
        const Eigen::Index rank = qr.rank();
        std::vector<Eigen::Index> cols(qr.colsPermutation().indices().data(),
                                       qr.colsPermutation().indices().data() + rank);
        std::sort(cols.begin(), cols.end());
        RMatrix basis(at.rows(), rank);
        RVector basis_rhs(rank);
        for (Eigen::Index i = 0; i < rank; ++i) {
            basis.col(i) = at.col(cols[static_cast<std::size_t>(i)]);
            const int k = candidates[static_cast<std::size_t>(cols[static_cast<std::size_t>(i)])];
            kept.push_back(k);
            basis_rhs(i) = b0(k) / rownorm(k);
        }
        if (rank < static_cast<Eigen::Index>(candidates.size())) {
            Eigen::ColPivHouseholderQR<RMatrix> bqr(basis);
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const int k = candidates[c];
                if (std::find(kept.begin(), kept.end(), k) != kept.end()) continue;
                const RVector coeff = bqr.solve(at.col(static_cast<Eigen::Index>(c)));
                const double implied = coeff.dot(basis_rhs);
                const double actual = b0(k) / rownorm(k);
                if (std::abs(implied - actual) > 1e-8 * (1.0 + std::abs(actual) + basis_rhs.cwiseAbs().maxCoeff())) {
                    sol.status = Status::infeasible;
                    return sol;
                }
            }
        }
    }
    sol.dropped_constraints = m0 - static_cast<int>(kept.size());

    // Scaled problem.
    Scaled p;
    p.dims = problem.blocks;
    p.total_dim = std::accumulate(p.dims.begin(), p.dims.end(), 0);
    p.m = static_cast<int>(kept.size());
    p.entries.resize(nblocks);
    p.b.resize(p.m);
    double beta = 1.0;
    for (int i = 0; i < p.m; ++i) beta = std::max(beta, std::abs(b0(kept[i]) / rownorm(kept[i])));
    for (int i = 0; i < p.m; ++i) {
        const int k = kept[i];
        p.b(i) = b0(k) / (rownorm(k) * beta);
        for (const auto& t : problem.constraints[k].terms) {
            auto& list = p.entries[t.block];
            auto it = std::find_if(list.begin(), list.end(), [&](const Entry& e) { return e.row == i; });
            if (it == list.end()) {
                list.push_back({i, t.coefficient / rownorm(k)});
            } else {
                it->a += t.coefficient / rownorm(k);
            }
        }
    }
    const double gamma = std::max(1.0, block_norm(c0));
    p.c.resize(nblocks);
    for (std::size_t blk = 0; blk < nblocks; ++blk) p.c[blk] = c0[blk] / gamma;

    // Original-scale residuals, computed on the full constraint list.
    const double norm_b0 = b0.norm();
    const double norm_c0 = block_norm(c0);
    auto metrics = [&](const BlockMatrix& xs, const RVector& ys, const BlockMatrix& zs, BlockMatrix& x_out,
                       RVector& y_out, BlockMatrix& z_out) {
        x_out.resize(nblocks);
        z_out.resize(nblocks);
        for (std::size_t blk = 0; blk < nblocks; ++blk) {
            x_out[blk] = beta * xs[blk];
            z_out[blk] = gamma * zs[blk];
        }
        y_out = RVector::Zero(m0);
        for (int i = 0; i < p.m; ++i) y_out(kept[i]) = gamma * ys(i) / rownorm(kept[i]);

        Metrics mt;
        mt.pobj = inner(c0, x_out);
        mt.dobj = b0.dot(y_out);
        RVector rp = b0;
        BlockMatrix rd = c0;
        for (int k = 0; k < m0; ++k)
            for (const auto& t : problem.constraints[k].terms) {
                rp(k) -= t.coefficient.cwiseProduct(x_out[t.block]).sum();
                rd[t.block] -= y_out(k) * t.coefficient;
            }
        for (std::size_t blk = 0; blk < nblocks; ++blk) rd[blk] -= z_out[blk];
        mt.pinf = rp.norm() / (1.0 + norm_b0);
        mt.dinf = block_norm(rd) / (1.0 + norm_c0);
        mt.gap = std::abs(mt.pobj - mt.dobj) / (1.0 + std::abs(mt.pobj) + std::abs(mt.dobj));
        return mt;
    };

    // Largest ||X Z||_F over blocks relative to tr(X) tr(Z) / n, floored at one.
    auto complementarity = [&](const BlockMatrix& xs, const BlockMatrix& zs) {
        double worst = 0.0;
        for (std::size_t blk = 0; blk < nblocks; ++blk) {
            const double scale = xs[blk].trace() * zs[blk].trace() / static_cast<double>(p.dims[blk]);
            worst = std::max(worst, (xs[blk] * zs[blk]).norm() / std::max(scale, 1.0));
        }
        return worst;
    };

    // Starting point: multiples of the identity sized to the data.
    BlockMatrix x(nblocks), z(nblocks);
    RVector y = RVector::Zero(p.m);
    const double bmax = p.m > 0 ? p.b.cwiseAbs().maxCoeff() : 0.0;
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        const double n = p.dims[blk];
        const double xi = std::max({10.0, std::sqrt(n), n * (1.0 + bmax) / 2.0});
        const double eta = std::max({10.0, std::sqrt(n), 1.0 + p.c[blk].norm()});
        x[blk] = xi * RMatrix::Identity(p.dims[blk], p.dims[blk]);
        z[blk] = eta * RMatrix::Identity(p.dims[blk], p.dims[blk]);
    }

    Metrics mt;
    bool infeasible_ray = false;
    bool unbounded_ray = false;
    int iter = 0;
    for (;; ++iter) {
        mt = metrics(x, y, z, sol.x, sol.y, sol.z);
        const double mu = inner(x, z) / p.total_dim;
        if (settings.record_history)
            sol.history.push_back({iter, sense * mt.pobj, sense * mt.dobj, mt.pinf, mt.dinf, mu});
        if (mt.gap <= settings.gap_tolerance && mt.pinf <= settings.gap_tolerance &&
            mt.dinf <= settings.gap_tolerance && complementarity(sol.x, sol.z) <= settings.complementarity_tolerance)
            break;
        if (iter >= settings.max_iterations) break;

        // Diverging iterates certify infeasibility of the other side.
        if (y.norm() > 1e10 && p.b.dot(y) > 0.0) {
            infeasible_ray = true;
            break;
        }
        if (block_norm(x) > 1e10 && inner(p.c, x) < 0.0) {
            unbounded_ray = true;
            break;
        }

        const RVector rp = p.b - apply_a(p, x);
        BlockMatrix rd = p.c;
        {
            const BlockMatrix aty = apply_at(p, y);
            for (std::size_t blk = 0; blk < nblocks; ++blk) rd[blk] -= aty[blk] + z[blk];
        }

        std::vector<Scaling> sc(nblocks);
        bool breakdown = false;
        for (std::size_t blk = 0; blk < nblocks && !breakdown; ++blk) {
            sc[blk].chol_x.compute(x[blk]);
            Eigen::LLT<RMatrix> chol_z(z[blk]);
            if (sc[blk].chol_x.info() != Eigen::Success || chol_z.info() != Eigen::Success) {
                breakdown = true;
                break;
            }
            const RMatrix lx = sc[blk].chol_x.matrixL();
            const RMatrix lz = chol_z.matrixL();
            Eigen::JacobiSVD<RMatrix> svd(lz.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
            sc[blk].q = svd.matrixV();
            sc[blk].d = svd.singularValues();
            if (!(sc[blk].d.minCoeff() > 0.0)) {
                breakdown = true;
                break;
            }
            sc[blk].g = lx * sc[blk].q * sc[blk].d.cwiseSqrt().cwiseInverse().asDiagonal();
            sc[blk].w = sc[blk].g * sc[blk].g.transpose();
        }
        if (breakdown) break;

        // Schur complement M_ij = <A_i, W A_j W>.
        RMatrix schur = RMatrix::Zero(p.m, p.m);
        for (std::size_t blk = 0; blk < nblocks; ++blk) {
            const auto& list = p.entries[blk];
            const RMatrix& w = sc[blk].w;
            for (const auto& ej : list) {
                const RMatrix waw = w * ej.a * w;
                for (const auto& ei : list) schur(ei.row, ej.row) += ei.a.cwiseProduct(waw).sum();
            }
        }
        schur = symmetrize(schur);
        Eigen::LLT<RMatrix> schur_llt(schur);
        Eigen::LDLT<RMatrix> schur_ldlt;
        const bool use_llt = schur_llt.info() == Eigen::Success;
        if (!use_llt) schur_ldlt.compute(schur);

        BlockMatrix wrdw(nblocks);
        for (std::size_t blk = 0; blk < nblocks; ++blk) wrdw[blk] = sc[blk].w * rd[blk] * sc[blk].w;

        auto direction = [&](const BlockMatrix& rc, BlockMatrix& dx, RVector& dy, BlockMatrix& dz) {
            BlockMatrix tmp(nblocks);
            for (std::size_t blk = 0; blk < nblocks; ++blk) tmp[blk] = rc[blk] - wrdw[blk];
            const RVector rhs = rp - apply_a(p, tmp);
            dy = use_llt ? RVector(schur_llt.solve(rhs)) : RVector(schur_ldlt.solve(rhs));
            const BlockMatrix atdy = apply_at(p, dy);
            dz.resize(nblocks);
            dx.resize(nblocks);
            for (std::size_t blk = 0; blk < nblocks; ++blk) {
                dz[blk] = symmetrize(rd[blk] - atdy[blk]);
                dx[blk] = symmetrize(rc[blk] - sc[blk].w * dz[blk] * sc[blk].w);
            }
        };

        // Predictor (affine scaling).
        BlockMatrix rc(nblocks);
        for (std::size_t blk = 0; blk < nblocks; ++blk) rc[blk] = -x[blk];
        BlockMatrix dx, dz;
        RVector dy;
        direction(rc, dx, dy, dz);
        const double ap_aff = std::min(1.0, max_step(x, dx));
        const double ad_aff = std::min(1.0, max_step(z, dz));
        const double mu_aff = inner(axpy(x, ap_aff, dx), axpy(z, ad_aff, dz)) / p.total_dim;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // Corrector in the scaled space, where X and Z both map to diag(d).
        for (std::size_t blk = 0; blk < nblocks; ++blk) {
            const Scaling& s = sc[blk];
            const auto& l = s.chol_x.matrixL();
            const RVector dsqrt = s.d.cwiseSqrt();
            RMatrix t = l.solve(dx[blk]);
            t = l.solve(t.transpose()).transpose();
            const RMatrix dx_s = dsqrt.asDiagonal() * (s.q.transpose() * t * s.q) * dsqrt.asDiagonal();
            const RMatrix dz_s = s.g.transpose() * dz[blk] * s.g;
            RMatrix rhs = -(dx_s * dz_s + dz_s * dx_s);
            for (Eigen::Index i = 0; i < rhs.rows(); ++i) rhs(i, i) += 2.0 * sigma * mu - 2.0 * s.d(i) * s.d(i);
            RMatrix r(rhs.rows(), rhs.cols());
            for (Eigen::Index i = 0; i < rhs.rows(); ++i)
                for (Eigen::Index j = 0; j < rhs.cols(); ++j) r(i, j) = rhs(i, j) / (s.d(i) + s.d(j));
            rc[blk] = symmetrize(s.g * r * s.g.transpose());
        }
        direction(rc, dx, dy, dz);

        const double tau = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
        const double ap = std::min(1.0, tau * max_step(x, dx));
        const double ad = std::min(1.0, tau * max_step(z, dz));
        if (std::max(ap, ad) < 1e-12) break;
        for (std::size_t blk = 0; blk < nblocks; ++blk) {
            x[blk] = symmetrize(x[blk] + ap * dx[blk]);
            z[blk] = symmetrize(z[blk] + ad * dz[blk]);
        }
        y += ad * dy;
    }

    mt = metrics(x, y, z, sol.x, sol.y, sol.z);
    sol.iterations = iter;
    sol.primal_objective = sense * mt.pobj;
    sol.dual_objective = sense * mt.dobj;
    sol.gap = mt.gap;
    sol.primal_residual = mt.pinf;
    sol.dual_residual = mt.dinf;
    sol.y *= sense;
    if (mt.gap <= settings.accept_tolerance && mt.pinf <= settings.accept_tolerance &&
        mt.dinf <= settings.accept_tolerance) {
        sol.status = Status::optimal;
    } else if (infeasible_ray) {
        sol.status = Status::infeasible;
    } else if (unbounded_ray) {
        sol.status = Status::unbounded;
    } else {
        sol.status = Status::max_iter;
    }
    return sol;
}

}  // namespace irscrb::sdp

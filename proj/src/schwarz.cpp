#include "nls/schwarz.hpp"

#include <chrono>
#include <cmath>

#include "nls/krylov.hpp"

namespace nls {

BlockPartition partition_dofs(const DofMap& dm, bool neumann) {
    BlockPartition part;
    part.blocks.assign(dm.n_blocks, {});
    int n = neumann ? dm.neumann_count : dm.interior_count;
    part.block_of.assign(n, -1);
    for (int d = 0; d < n; ++d) {
        int blk;
        if (neumann) {
            blk = dm.block_of_dof(d);
            if (blk <= 0)
                throw ConfigError("partition_dofs: interaction-layer dof without a boundary part");
        } else {
            blk = dm.dofs[d].owner;
            if (blk <= 0)
                throw ConfigError(
                    "partition_dofs: dof whose basis support straddles subdomains (unsplit hat)");
        }
        if (blk > dm.n_blocks) throw ConfigError("partition_dofs: block id out of range");
        part.blocks[blk - 1].push_back(d);
        part.block_of[d] = blk - 1;
    }
    for (int i = 0; i < part.n_blocks(); ++i)
        if (part.blocks[i].empty()) throw ConfigError("partition_dofs: subdomain with no dofs");
    return part;
}

BlockPartition single_block(int n) {
    BlockPartition part;
    part.blocks.assign(1, {});
    part.block_of.assign(n, 0);
    for (int i = 0; i < n; ++i) part.blocks[0].push_back(i);
    return part;
}

BlockSolver::BlockSolver(const CSR& A, const BlockPartition& part) : part_(part) {
    int nb = part_.n_blocks();
    mats_.reserve(nb);
    lu_.reserve(nb);
    for (int b = 0; b < nb; ++b) {
        const auto& idx = part_.blocks[b];
        int m = static_cast<int>(idx.size());
        DenseMatrix blk(m, m);
        std::vector<int> local(A.n, -1);
        for (int k = 0; k < m; ++k) local[idx[k]] = k;
        for (int k = 0; k < m; ++k) {
            int row = idx[k];
            for (int p = A.rowptr[row]; p < A.rowptr[row + 1]; ++p) {
                int lc = local[A.col[p]];
                if (lc >= 0) blk(k, lc) += A.val[p];
            }
        }
        mats_.push_back(blk);
        lu_.emplace_back(std::move(blk));
    }
}

void BlockSolver::solve(int block, const double* rhs, double* x) const { lu_[block].solve(rhs, x); }

DenseMatrix BlockSolver::block_matrix(int block) const { return mats_[block]; }

std::pair<std::vector<double>, IterationTrace> schwarz_solve(const SparseSystem& sys,
                                                             const BlockPartition& part,
                                                             const SchwarzConfig& cfg,
                                                             std::vector<double> u0) {
    if (!(cfg.outer_tol >= 0.0 && cfg.outer_tol < 1.0))
        throw std::invalid_argument("schwarz_solve: outer tolerance out of range");
    if (cfg.inner_solver == InnerSolver::GMRES &&
        !(cfg.inner_tol > 0.0 && cfg.inner_tol <= cfg.outer_tol))
        throw std::invalid_argument("schwarz_solve: need 0 < inner_tol <= outer_tol");
    if (cfg.max_outer < 0) throw std::invalid_argument("schwarz_solve: max_outer must be >= 0");

    int n = sys.n_unknowns;
    const CSR& A = sys.A;
    IterationTrace trace;
    auto t0 = std::chrono::steady_clock::now();

    std::unique_ptr<BlockSolver> direct;
    std::vector<DenseMatrix> dense_blocks;
    if (cfg.inner_solver == InnerSolver::DIRECT) {
        direct = std::make_unique<BlockSolver>(A, part);
    } else {
        BlockSolver tmp(A, part);
        for (int b = 0; b < part.n_blocks(); ++b) dense_blocks.push_back(tmp.block_matrix(b));
    }
    trace.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<double> u = u0.empty() ? std::vector<double>(n, 0.0) : std::move(u0);
    if (static_cast<int>(u.size()) != n) throw std::invalid_argument("schwarz_solve: bad initial guess size");

    auto residual_norm = [&](const std::vector<double>& uu) {
        auto r = A.matvec(uu);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = sys.b[i] - r[i];
            s += d * d;
        }
        return std::sqrt(s);
    };

    auto block_rhs = [&](int blk, const std::vector<double>& uu, std::vector<double>& rhs) {
        const auto& idx = part.blocks[blk];
        rhs.resize(idx.size());
        for (size_t k = 0; k < idx.size(); ++k) {
            int row = idx[k];
            double s = sys.b[row];
            for (int p = A.rowptr[row]; p < A.rowptr[row + 1]; ++p) {
                int c = A.col[p];
                if (part.block_of[c] != blk) s -= A.val[p] * uu[c];
            }
            rhs[k] = s;
        }
    };

    auto solve_block = [&](int blk, const std::vector<double>& rhs, std::vector<double>& x) {
        x.resize(rhs.size());
        if (cfg.inner_solver == InnerSolver::DIRECT) {
            direct->solve(blk, rhs.data(), x.data());
        } else {
            x = dense_solve_gmres(dense_blocks[blk], rhs, cfg.inner_tol, 10000);
        }
    };

    t0 = std::chrono::steady_clock::now();
    double rn = residual_norm(u);
    trace.residuals.push_back(rn);
    if (cfg.record_iterates) trace.iterates.push_back(u);
    double r0 = rn;
    int high_count = 0;

    std::vector<double> rhs, x;
    int nb = part.n_blocks();
    std::vector<std::vector<double>> xs(nb);

    while (!(rn < cfg.outer_tol) && trace.iterations < cfg.max_outer) {
        if (cfg.variant == SchwarzVariant::MULTIPLICATIVE) {
            for (int blk = 0; blk < nb; ++blk) {
                block_rhs(blk, u, rhs);
                solve_block(blk, rhs, x);
                const auto& idx = part.blocks[blk];
                if (cfg.theta == 1.0) {
                    for (size_t k = 0; k < idx.size(); ++k) u[idx[k]] = x[k];
                } else {
                    for (size_t k = 0; k < idx.size(); ++k)
                        u[idx[k]] = (1.0 - cfg.theta) * u[idx[k]] + cfg.theta * x[k];
                }
            }
        } else {
            // additive: all block solves read the previous iterate
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
            for (int blk = 0; blk < nb; ++blk) {
                std::vector<double> brhs;
                block_rhs(blk, u, brhs);
                solve_block(blk, brhs, xs[blk]);
            }
            for (int blk = 0; blk < nb; ++blk) {
                const auto& idx = part.blocks[blk];
                if (cfg.theta == 1.0) {
                    for (size_t k = 0; k < idx.size(); ++k) u[idx[k]] = xs[blk][k];
                } else {
                    for (size_t k = 0; k < idx.size(); ++k)
                        u[idx[k]] = (1.0 - cfg.theta) * u[idx[k]] + cfg.theta * xs[blk][k];
                }
            }
        }
        ++trace.iterations;
        rn = residual_norm(u);
        trace.residuals.push_back(rn);
        if (cfg.record_iterates) trace.iterates.push_back(u);
        if (!std::isfinite(rn)) throw DivergenceError("schwarz_solve: residual is not finite");
        if (rn > 10.0 * r0) {
            if (++high_count >= 50) throw DivergenceError("schwarz_solve: residual diverged");
        } else {
            high_count = 0;
        }
    }
    trace.converged = rn < cfg.outer_tol;
    trace.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(u), std::move(trace)};
}

}  // namespace nls

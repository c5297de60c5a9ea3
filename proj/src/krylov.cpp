#include "nls/krylov.hpp"

#include <chrono>
#include <cmath>

namespace nls {

Preconditioner Preconditioner::none() { return Preconditioner(); }

Preconditioner Preconditioner::block_jacobi(const CSR& A, const BlockPartition& part) {
    Preconditioner m;
    m.kind_ = PrecondKind::BLOCK_JACOBI;
    m.a_ = &A;
    m.part_ = part;
    m.blocks_ = std::make_shared<BlockSolver>(A, part);
    return m;
}

Preconditioner Preconditioner::block_gs(const CSR& A, const BlockPartition& part) {
    Preconditioner m = block_jacobi(A, part);
    m.kind_ = PrecondKind::BLOCK_GS;
    return m;
}

void Preconditioner::apply(const double* v, double* out) const {
    if (kind_ == PrecondKind::NONE)
        throw std::logic_error("Preconditioner::apply(raw) requires a matrix-backed kind");
    int nb = part_.n_blocks();
    if (kind_ == PrecondKind::BLOCK_JACOBI) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (int b = 0; b < nb; ++b) {
            const auto& idx = part_.blocks[b];
            std::vector<double> rhs(idx.size()), x(idx.size());
            for (size_t k = 0; k < idx.size(); ++k) rhs[k] = v[idx[k]];
            blocks_->solve(b, rhs.data(), x.data());
            for (size_t k = 0; k < idx.size(); ++k) out[idx[k]] = x[k];
        }
        return;
    }
    // block-Gauss-Seidel: forward solve through the lower block triangle
    for (int b = 0; b < nb; ++b) {
        const auto& idx = part_.blocks[b];
        std::vector<double> rhs(idx.size()), x(idx.size());
        for (size_t k = 0; k < idx.size(); ++k) {
            int row = idx[k];
            double s = v[row];
            for (int p = a_->rowptr[row]; p < a_->rowptr[row + 1]; ++p) {
                int c = a_->col[p];
                int bc = part_.block_of[c];
                if (bc < b) s -= a_->val[p] * out[c];
            }
            rhs[k] = s;
        }
        blocks_->solve(b, rhs.data(), x.data());
        for (size_t k = 0; k < idx.size(); ++k) out[idx[k]] = x[k];
    }
}

std::vector<double> Preconditioner::apply(const std::vector<double>& v) const {
    if (kind_ == PrecondKind::NONE) return v;
    std::vector<double> out(v.size(), 0.0);
    apply(v.data(), out.data());
    return out;
}

namespace {

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

GmresResult gmres(const CSR& A, const std::vector<double>& b, const Preconditioner& M, double tol,
                  int max_iter, int restart, const std::vector<double>& x0) {
    int n = A.n;
    GmresResult res;
    res.x = x0.empty() ? std::vector<double>(n, 0.0) : x0;
    IterationTrace& trace = res.trace;
    auto t0 = std::chrono::steady_clock::now();

    std::vector<double> mb = M.apply(b);
    double bnorm = norm2_vec(mb);
    if (bnorm == 0.0) bnorm = 1.0;

    int total_iters = 0;
    int cycle = restart > 0 ? restart : max_iter;

    auto true_residual = [&]() {
        auto r = A.matvec(res.x);
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        return norm2_vec(r);
    };

    while (true) {
        // r0 = M^-1 (b - A x)
        auto r = A.matvec(res.x);
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        r = M.apply(r);
        double beta = norm2_vec(r);
        if (trace.residuals.empty()) {
            trace.residuals.push_back(beta);
            trace.true_residuals.push_back(true_residual());
        }
        if (beta / bnorm < tol) {
            trace.converged = true;
            break;
        }
        if (total_iters >= max_iter) break;

        std::vector<std::vector<double>> V;
        V.push_back(r);
        for (double& v : V[0]) v /= beta;
        std::vector<std::vector<double>> H;  // H[j] holds column j (j+2 entries)
        std::vector<double> cs, sn, gvec{beta};
        bool happy = false;

        int j = 0;
        for (; j < cycle && total_iters < max_iter; ++j) {
            ++total_iters;
            auto w = M.apply(A.matvec(V[j]));
            std::vector<double> h(j + 2, 0.0);
            double before = norm2_vec(w);
            for (int i = 0; i <= j; ++i) {
                double hij = dot_vec(w, V[i]);
                h[i] = hij;
                for (int k = 0; k < n; ++k) w[k] -= hij * V[i][k];
            }
            // re-orthogonalize on significant cancellation
            if (norm2_vec(w) < 0.7071 * before) {
                for (int i = 0; i <= j; ++i) {
                    double c = dot_vec(w, V[i]);
                    h[i] += c;
                    for (int k = 0; k < n; ++k) w[k] -= c * V[i][k];
                }
            }
            double hn = norm2_vec(w);
            h[j + 1] = hn;

            // apply stored Givens rotations, then form the new one
            for (int i = 0; i < j; ++i) {
                double t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            double denom = std::hypot(h[j], h[j + 1]);
            if (denom == 0.0) throw BreakdownError("gmres: zero Hessenberg column");
            cs.push_back(h[j] / denom);
            sn.push_back(h[j + 1] / denom);
            h[j] = denom;
            h[j + 1] = 0.0;
            gvec.push_back(-sn[j] * gvec[j]);
            gvec[j] = cs[j] * gvec[j];
            H.push_back(std::move(h));

            double resid = std::abs(gvec[j + 1]);
            trace.residuals.push_back(resid);

            if (hn < 1e-14 * beta) {
                // invariant subspace reached
                if (resid / bnorm >= tol)
                    throw BreakdownError("gmres: Krylov breakdown with nonzero residual");
                happy = true;
                ++j;
                break;
            }
            if (resid / bnorm < tol) {
                ++j;
                break;
            }
            for (double& v : w) v /= hn;
            V.push_back(std::move(w));
        }

        // back-substitute y and update x
        std::vector<double> y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = gvec[i];
            for (int k = i + 1; k < j; ++k) s -= H[k][i] * y[k];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < j; ++i)
            for (int k = 0; k < n; ++k) res.x[k] += y[i] * V[i][k];
        trace.true_residuals.push_back(true_residual());

        double rel = trace.residuals.back() / bnorm;
        if (rel < tol || happy) {
            trace.converged = true;
            break;
        }
        if (total_iters >= max_iter) break;
    }

    trace.iterations = total_iters;
    trace.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<double> dense_solve_gmres(const DenseMatrix& A, const std::vector<double>& b, double tol,
                                      int max_iter) {
    // wrap the dense matrix in a CSR view
    CSR a;
    a.n = A.n;
    a.m = A.m;
    a.rowptr.resize(A.n + 1);
    a.col.resize(static_cast<size_t>(A.n) * A.m);
    a.val.resize(a.col.size());
    for (int i = 0; i < A.n; ++i) {
        a.rowptr[i + 1] = (i + 1) * A.m;
        for (int jj = 0; jj < A.m; ++jj) {
            a.col[static_cast<size_t>(i) * A.m + jj] = jj;
            a.val[static_cast<size_t>(i) * A.m + jj] = A(i, jj);
        }
    }
    auto r = gmres(a, b, Preconditioner::none(), tol, max_iter);
    return r.x;
}

double condition_estimate(const CSR& A, const Preconditioner& M, CondMethod method) {
    if (A.n != A.m) throw std::invalid_argument("condition_estimate: matrix must be square");
    if (A.n > 5000) throw std::invalid_argument("condition_estimate: dense conversion capped at 5000 dofs");
    int n = A.n;

    // B = M^-1 A, column by column
    DenseMatrix B(n, n);
    {
        DenseMatrix Ad = A.to_dense();
        std::vector<double> colv(n), out(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) firstprivate(colv, out)
#endif
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) colv[i] = Ad(i, j);
            if (M.kind() == PrecondKind::NONE) {
                out = colv;
            } else {
                M.apply(colv.data(), out.data());
            }
            for (int i = 0; i < n; ++i) B(i, j) = out[i];
        }
    }

    if (method == CondMethod::DENSE) {
        auto sv = singular_values(B);
        double smin = sv.front(), smax = sv.back();
        if (!(smin > 0.0) || !std::isfinite(smax))
            throw FactorizationError("condition_estimate: numerically singular operator");
        return smax / smin;
    }

    // power iteration on B^T B for sigma_max, inverse iteration for sigma_min
    auto matvec = [&](const std::vector<double>& v) {
        std::vector<double> t(n, 0.0), out(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += B(i, j) * v[j];
            t[i] = s;
        }
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += B(i, j) * t[i];
            out[j] = s;
        }
        return out;
    };
    DenseLU lu(B);
    auto inv_matvec = [&](const std::vector<double>& v) {
        std::vector<double> t(n), out(n);
        lu.solve_transposed(v.data(), t.data());
        lu.solve(t.data(), out.data());
        return out;
    };
    auto power = [&](auto&& op) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = 1.0 / std::sqrt(1.0 + i);
        double lam = 0.0;
        for (int it = 0; it < 1000; ++it) {
            auto w = op(v);
            double nw = norm2_vec(w);
            if (nw == 0.0) throw FactorizationError("condition_estimate: singular operator");
            for (double& x : w) x /= nw;
            double lam_new = dot_vec(w, op(w));
            bool done = std::abs(lam_new - lam) <= 1e-6 * std::abs(lam_new) && it > 4;
            lam = lam_new;
            v = std::move(w);
            if (done) break;
        }
        return lam;
    };
    double smax = std::sqrt(power(matvec));
    double smin = 1.0 / std::sqrt(power(inv_matvec));
    return smax / smin;
}

}  // namespace nls

#include "nls/dense.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nls {

DenseLU::DenseLU(DenseMatrix A) : n_(A.n), lu_(std::move(A)), piv_(n_) {
    if (lu_.n != lu_.m) throw std::invalid_argument("DenseLU: matrix must be square");
    for (int k = 0; k < n_; ++k) {
        int p = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n_; ++i) {
            double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0) throw FactorizationError("DenseLU: singular matrix");
        piv_[k] = p;
        if (p != k)
            for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
        double d = lu_(k, k);
        for (int i = k + 1; i < n_; ++i) {
            double f = lu_(i, k) / d;
            lu_(i, k) = f;
            if (f != 0.0) {
                double* ri = &lu_(i, 0);
                const double* rk = &lu_(k, 0);
                for (int j = k + 1; j < n_; ++j) ri[j] -= f * rk[j];
            }
        }
    }
}

void DenseLU::solve(const double* b, double* x) const {
    std::copy(b, b + n_, x);
    // rows were swapped in full during factorization: permute first, then the
    // clean triangular solves
    for (int k = 0; k < n_; ++k)
        if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
    for (int k = 0; k < n_; ++k) {
        double xk = x[k];
        if (xk != 0.0)
            for (int i = k + 1; i < n_; ++i) x[i] -= lu_(i, k) * xk;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        const double* ri = &lu_.a[static_cast<size_t>(i) * n_];
        for (int j = i + 1; j < n_; ++j) s -= ri[j] * x[j];
        x[i] = s / ri[i];
    }
}

std::vector<double> DenseLU::solve(const std::vector<double>& b) const {
    std::vector<double> x(n_);
    solve(b.data(), x.data());
    return x;
}

void DenseLU::solve_transposed(const double* b, double* x) const {
    // A = P^T L U  =>  A^T = U^T L^T P
    std::copy(b, b + n_, x);
    for (int i = 0; i < n_; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu_(j, i) * x[j];
        x[i] = s / lu_(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n_; ++j) s -= lu_(j, i) * x[j];
        x[i] = s;
    }
    for (int k = n_ - 1; k >= 0; --k)
        if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
}

static void tridiagonalize(DenseMatrix& A, std::vector<double>& d, std::vector<double>& e) {
    // Householder reduction (Numerical Recipes tred2 layout, no eigenvectors).
    int n = A.n;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (int i = n - 1; i >= 1; --i) {
        int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (int k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = A(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) d[i] = A(i, i);
}

static std::vector<double> ql_eigen(std::vector<double> d, std::vector<double> e) {
    int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 80) throw FactorizationError("ql_eigen: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& A) {
    if (A.n != A.m) throw std::invalid_argument("symmetric_eigenvalues: matrix must be square");
    if (A.n == 0) return {};
    if (A.n == 1) return {A(0, 0)};
    DenseMatrix W = A;
    std::vector<double> d, e;
    tridiagonalize(W, d, e);
    return ql_eigen(std::move(d), std::move(e));
}

std::vector<double> singular_values(const DenseMatrix& A) {
    if (A.n != A.m) throw std::invalid_argument("singular_values: matrix must be square");
    int n = A.n;
    DenseMatrix G(n, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += A(k, i) * A(k, j);
            G(i, j) = s;
            G(j, i) = s;
        }
    auto ev = symmetric_eigenvalues(G);
    for (auto& v : ev) v = std::sqrt(std::max(v, 0.0));
    return ev;
}

}  // namespace nls

#ifndef NLS_DENSE_HPP
#define NLS_DENSE_HPP

#include <vector>

#include "nls/errors.hpp"

namespace nls {

// Row-major dense matrix.
struct DenseMatrix {
    int n = 0, m = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : n(rows), m(cols), a(static_cast<size_t>(rows) * cols, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * m + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * m + j]; }
};

// LU factorization with partial pivoting; deterministic op order.
class DenseLU {
public:
    DenseLU() = default;
    explicit DenseLU(DenseMatrix A);

    int size() const { return n_; }
    // x := A^-1 b
    void solve(const double* b, double* x) const;
    std::vector<double> solve(const std::vector<double>& b) const;
    // x := A^-T b
    void solve_transposed(const double* b, double* x) const;

private:
    int n_ = 0;
    DenseMatrix lu_;
    std::vector<int> piv_;
};

// Eigenvalues of a symmetric matrix (Householder tridiagonalization + QL with
// implicit shifts). Ascending order.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& A);

// Singular values of a square matrix via eigenvalues of A^T A.
std::vector<double> singular_values(const DenseMatrix& A);

}  // namespace nls

#endif

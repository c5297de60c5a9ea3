#ifndef NLS_CSR_HPP
#define NLS_CSR_HPP

#include <cmath>
#include <vector>

#include "nls/dense.hpp"

namespace nls {

struct CSR {
    int n = 0, m = 0;
    std::vector<int> rowptr{0};
    std::vector<int> col;
    std::vector<double> val;

    void matvec(const double* x, double* y) const {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
            y[i] = s;
        }
    }
    std::vector<double> matvec(const std::vector<double>& x) const {
        std::vector<double> y(n, 0.0);
        if (m > 0 && !x.empty()) matvec(x.data(), y.data());
        return y;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(n, m);
        for (int i = 0; i < n; ++i)
            for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) d(i, col[k]) += val[k];
        return d;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : val) s += v * v;
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0.0;
        for (double v : val) s = std::max(s, std::abs(v));
        return s;
    }
};

inline double norm2_vec(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace nls

#endif

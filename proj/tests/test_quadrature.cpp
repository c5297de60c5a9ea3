#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/quadrature.hpp"

using namespace nls;

namespace {

double integrate_monomial(const TriRule& r, int px, int py) {
    double s = 0.0;
    for (size_t q = 0; q < r.p.size(); ++q)
        s += r.w[q] * std::pow(r.p[q].x, px) * std::pow(r.p[q].y, py);
    return s;
}

// exact integral of x^p y^q over the reference triangle
double exact_monomial(int p, int q) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return fact(p) * fact(q) / fact(p + q + 2);
}

}  // namespace

TEST_CASE("triangle rules: positive weights summing to the reference area") {
    for (int n : {1, 3, 6, 7}) {
        const TriRule& r = triangle_rule(n);
        double sum = 0.0;
        for (double w : r.w) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("triangle rules: exact up to the advertised degree") {
    for (int n : {1, 3, 6, 7}) {
        const TriRule& r = triangle_rule(n);
        for (int p = 0; p <= r.degree; ++p)
            for (int q = 0; p + q <= r.degree; ++q) {
                CAPTURE(n);
                CAPTURE(p);
                CAPTURE(q);
                CHECK(integrate_monomial(r, p, q) ==
                      doctest::Approx(exact_monomial(p, q)).epsilon(1e-13));
            }
    }
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    for (int n : {2, 4, 8, 16}) {
        const Gauss1D& g = gauss_legendre(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], p);
            CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("degenerate quadrature configuration is rejected") {
    QuadratureConfig cfg;
    cfg.singular_rule = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    QuadratureConfig cfg2;
    cfg2.outer_rule = 5;  // unsupported point count
    CHECK_THROWS_AS(cfg2.validate(), ConfigError);
}

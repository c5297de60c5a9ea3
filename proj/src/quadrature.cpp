#include "nls/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace nls {

static Gauss1D make_gauss(int n) {
    // Newton iteration on Legendre polynomials, nodes mapped to [0,1].
    Gauss1D g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        g.x[i] = 0.5 * (1.0 - z);
        g.x[n - 1 - i] = 0.5 * (1.0 + z);
        g.w[i] = 0.5 * w;
        g.w[n - 1 - i] = 0.5 * w;
    }
    return g;
}

const Gauss1D& gauss_legendre(int n) {
    if (n < 1 || n > 512) throw ConfigError("gauss_legendre: order out of range");
    static std::map<int, Gauss1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
    return it->second;
}

static TriRule make_tri_rule(int npoints) {
    TriRule r;
    auto add = [&](double a, double b, double w) {
        r.p.push_back({a, b});
        r.w.push_back(w);
    };
    switch (npoints) {
        case 1:
            add(1.0 / 3.0, 1.0 / 3.0, 0.5);
            r.degree = 1;
            break;
        case 3:
            // edge midpoints, degree 2
            add(0.5, 0.0, 1.0 / 6.0);
            add(0.5, 0.5, 1.0 / 6.0);
            add(0.0, 0.5, 1.0 / 6.0);
            r.degree = 2;
            break;
        case 6: {
            // Strang-Fix degree 4
            double a1 = 0.816847572980459, b1 = 0.091576213509771, w1 = 0.109951743655322 / 2.0;
            double a2 = 0.108103018168070, b2 = 0.445948490915965, w2 = 0.223381589678011 / 2.0;
            add(b1, b1, w1);
            add(a1, b1, w1);
            add(b1, a1, w1);
            add(b2, b2, w2);
            add(a2, b2, w2);
            add(b2, a2, w2);
            r.degree = 4;
            break;
        }
        case 7: {
            // degree 5 (centroid + two symmetric orbits)
            add(1.0 / 3.0, 1.0 / 3.0, 0.225 / 2.0);
            double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506 / 2.0;
            double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827 / 2.0;
            add(a1, b1, w1);
            add(b1, a1, w1);
            add(b1, b1, w1);
            add(a2, b2, w2);
            add(b2, a2, w2);
            add(b2, b2, w2);
            r.degree = 5;
            break;
        }
        default:
            throw ConfigError("triangle_rule: unsupported point count");
    }
    return r;
}

const TriRule& triangle_rule(int npoints) {
    static std::map<int, TriRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(npoints);
    if (it == cache.end()) it = cache.emplace(npoints, make_tri_rule(npoints)).first;
    return it->second;
}

}  // namespace nls

#ifndef NLS_QUADRATURE_HPP
#define NLS_QUADRATURE_HPP

#include <vector>

#include "nls/errors.hpp"
#include "nls/geometry.hpp"

namespace nls {

// Gauss-Legendre nodes/weights on [0,1].
struct Gauss1D {
    std::vector<double> x, w;
};
const Gauss1D& gauss_legendre(int n);

// Symmetric quadrature rule on the reference triangle {(0,0),(1,0),(0,1)};
// weights sum to the reference area 1/2. Supported point counts: 1, 3, 6, 7.
struct TriRule {
    std::vector<Vec2> p;
    std::vector<double> w;
    int degree = 0;
};
const TriRule& triangle_rule(int npoints);

enum class BallHandling {
    // Interaction ball resolved exactly: radial integration split at every
    // kernel horizon (and pair integrals routed through the relative-
    // coordinate rule whenever a horizon can cut the pair).
    CAPPED,
    // Ball indicator merely sampled at quadrature points (O(h) horizon error).
    INDICATOR,
};

struct QuadratureConfig {
    int outer_rule = 7;   // triangle rule for outer element integrals
    int inner_rule = 7;   // triangle rule for inner element integrals
    int singular_rule = 8;  // base radial x angular Gauss count per subregion
    BallHandling ball_handling = BallHandling::CAPPED;
    // Refinement multiplier for the relative-coordinate rule (oracle uses 4).
    int refine = 1;

    void validate() const {
        if (singular_rule < 1 || refine < 1) throw ConfigError("degenerate quadrature rule");
        triangle_rule(outer_rule);
        triangle_rule(inner_rule);
    }
};

}  // namespace nls

#endif

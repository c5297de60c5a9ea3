#ifndef NLS_ASSEMBLY_HPP
#define NLS_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <vector>

#include "nls/csr.hpp"
#include "nls/kernel.hpp"
#include "nls/mesh.hpp"
#include "nls/pair_quadrature.hpp"
#include "nls/quadrature.hpp"

namespace nls {

// Bivariate polynomial up to degree 3 (patch-test forcings are at most linear;
// boundary data at most cubic).
struct Poly2 {
    // 1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3
    std::array<double, 10> c{};

    double eval(Vec2 p) const {
        double x = p.x, y = p.y;
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y +
               c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
    }
    static Poly2 constant(double v) {
        Poly2 p;
        p.c[0] = v;
        return p;
    }
};

// Piecewise-polynomial forcing, one polynomial per subdomain.
struct Forcing {
    std::vector<Poly2> per_region;  // indexed 1..n (entry 0 unused)

    double eval(Vec2 p, int region) const { return per_region.at(region).eval(p); }
    static Forcing constants(const std::vector<double>& vals) {
        Forcing f;
        f.per_region.resize(vals.size() + 1);
        for (size_t i = 0; i < vals.size(); ++i) f.per_region[i + 1] = Poly2::constant(vals[i]);
        return f;
    }
    static Forcing uniform(const Poly2& p, int n_regions) {
        Forcing f;
        f.per_region.assign(n_regions + 1, p);
        return f;
    }
};

struct SparseSystem {
    CSR A;    // unknown x unknown stiffness block
    CSR A_I;  // unknown x Dirichlet coupling block
    std::vector<double> f;  // load vector
    std::vector<double> g;  // Dirichlet coefficients
    std::vector<double> b;  // f - A_I g
    int n_unknowns = 0;
    int n_dirichlet = 0;

    std::vector<double> residual(const std::vector<double>& u) const {
        auto r = A.matvec(u);
        for (int i = 0; i < n_unknowns; ++i) r[i] = b[i] - r[i];
        return r;
    }
};

// Stiffness blocks, load vector and lifted right-hand side of the constrained
// problem: rows are non-Dirichlet dofs, Dirichlet dofs are eliminated through
// A_I and the vertex-interpolated boundary data g.
SparseSystem assemble_dirichlet(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel,
                                const QuadratureConfig& quad, const Forcing& forcing,
                                const std::function<double(Vec2)>& boundary_data);

// Neumann-constrained problem: every dof is an unknown, the bilinear form
// gains the kappa-weighted mass term and the right-hand side the boundary
// flux term. With reduced=true, layer-layer element pairs are skipped.
SparseSystem assemble_neumann(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel,
                              const QuadratureConfig& quad, const std::vector<double>& kappa,
                              const Forcing& forcing, const std::vector<double>& neumann_data,
                              bool reduced = true);

}  // namespace nls

#endif

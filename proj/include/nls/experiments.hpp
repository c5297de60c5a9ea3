#ifndef NLS_EXPERIMENTS_HPP
#define NLS_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "nls/assembly.hpp"
#include "nls/kernel.hpp"
#include "nls/krylov.hpp"
#include "nls/mesh.hpp"
#include "nls/schwarz.hpp"

namespace nls {

// An assembled experiment instance.
struct Problem {
    Mesh mesh;
    DofMap dm;
    KernelSpec kernel{1, 1.0};
    SparseSystem sys;
    BlockPartition part;
    bool neumann = false;
    // exact boundary/solution polynomial for patch tests
    Poly2 exact;
    bool has_exact = false;
};

// Three-subdomain Dirichlet problem with the singular symmetric kernel,
// forcing 5/5/1 and zero boundary data.
Problem make_dirichlet_problem(double h, double delta = 0.1, double s = 0.5,
                               QuadratureConfig quad = {});

// Two-subdomain Neumann problem with the constant kernel, kappa = 1/10,
// forcing 10/1 and flux data gN (zero by default).
Problem make_neumann_problem(double h, double delta = 0.1, QuadratureConfig quad = {},
                             std::vector<double> gN = {0.0, 0.0, 0.0});

// Coupled constant/fractional two-subdomain Dirichlet problem whose exact
// solution is a polynomial of the given degree (1: x+y with f=0; 2: x^2 and
// 3: x^3 with the forcing manufactured from the kernel's second moment).
Problem make_patch_problem(double h, int degree = 1, double delta1 = 0.1, double delta2 = 0.1,
                           double s2 = 0.6, QuadratureConfig quad = {});

// Same coupled kernel with f = 10, g = 0 (preconditioner benchmark problem).
Problem make_bench_problem(double h, double s, double delta1, double delta2,
                           QuadratureConfig quad = {});

// Full nodal field of a solve: unknown coefficients plus Dirichlet data,
// indexed by dof id.
std::vector<double> full_field(const Problem& p, const std::vector<double>& u);

// Evaluate a nodal field at a point inside a given element.
double eval_field(const Mesh& mesh, const DofMap& dm, const std::vector<double>& field, int elem,
                  Vec2 x);

// L2 norm over the full meshed domain of (field_a - field_b), both fields
// living on possibly different (nested) meshes; quadrature on mesh_a, which
// must be the finer one and contained in mesh_b's grid.
double l2_distance(const Mesh& mesh_a, const DofMap& dm_a, const std::vector<double>& field_a,
                   const Mesh& mesh_b, const DofMap& dm_b, const std::vector<double>& field_b);

// L2 norm of (field - p) over the full meshed domain.
double l2_distance_poly(const Mesh& mesh, const DofMap& dm, const std::vector<double>& field,
                        const Poly2& p);

struct PatchReport {
    double max_error = 0.0;  // max |u_i - p(x_i)| over unknowns
    double l2_error = 0.0;   // L2 distance to the nodal interpolant of p
    IterationTrace trace;
    std::vector<double> field;
};
PatchReport run_patch(const Problem& p, const SchwarzConfig& cfg);

struct BenchRow {
    double h, s, delta2;
    std::string solver;
    int iterations;
    double cond;
};
struct BenchConfig {
    double delta1 = 0.1;
    std::vector<double> h_sweep{0.1, 0.05, 0.025};
    std::vector<double> s_sweep{0.2, 0.5, 0.8};
    std::vector<double> delta2_sweep{0.1, 0.05, 0.025};
    double h_fine = 0.025;
    double s_base = 0.5;
    double tol = 1e-10;
    int max_iter = 50000;
    int restart = 20;  // GMRES restart length; 0 = full
    QuadratureConfig quad;
};
std::vector<BenchRow> run_gmres_bench(const BenchConfig& cfg);

struct HStudyRow {
    std::string series;
    double h;
    double l2;
};
struct HStudyResult {
    std::vector<HStudyRow> rows;
    double slope_dirichlet = 0.0, slope_neumann = 0.0, slope_patch = 0.0;
};
HStudyResult run_h_study(const std::vector<double>& h_list, double h_ref, double tol = 1e-11,
                         QuadratureConfig quad = {});

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
// Coefficient of determination of the same fit.
double loglog_r2(const std::vector<double>& x, const std::vector<double>& y);
// Coefficient of determination of log(residual) against the iteration index.
double residual_trace_r2(const std::vector<double>& residuals);

}  // namespace nls

#endif

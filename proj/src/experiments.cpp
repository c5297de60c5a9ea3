#include "nls/experiments.hpp"

#include <cmath>
#include <map>

namespace nls {

Problem make_dirichlet_problem(double h, double delta, double s, QuadratureConfig quad) {
    Problem p;
    p.mesh = build_mesh(DomainLayout::unit_square(Splitter::THREE_REGION), h, delta);
    p.dm = build_dof_map(p.mesh);
    p.kernel = KernelSpec::dirichlet_three_region(s, delta);
    p.sys = assemble_dirichlet(p.mesh, p.dm, p.kernel, quad,
                               Forcing::constants({5.0, 5.0, 1.0}), [](Vec2) { return 0.0; });
    p.part = partition_dofs(p.dm);
    return p;
}

Problem make_neumann_problem(double h, double delta, QuadratureConfig quad, std::vector<double> gN) {
    Problem p;
    p.neumann = true;
    p.mesh = build_mesh(DomainLayout::unit_square(Splitter::TWO_REGION, BoundarySplit::VERTICAL), h,
                        delta);
    p.dm = build_dof_map(p.mesh);
    p.kernel = KernelSpec::neumann_constant(delta);
    p.sys = assemble_neumann(p.mesh, p.dm, p.kernel, quad, {0.0, 1.0, 10.0},
                             Forcing::constants({10.0, 1.0}), gN, /*reduced=*/true);
    p.part = partition_dofs(p.dm, /*neumann=*/true);
    return p;
}

namespace {

Poly2 patch_polynomial(int degree) {
    Poly2 p;
    switch (degree) {
        case 1:
            p.c[1] = 1.0;
            p.c[2] = 1.0;
            break;  // x + y
        case 2:
            p.c[3] = 1.0;
            break;  // x^2
        case 3:
            p.c[6] = 1.0;
            break;  // x^3
        default:
            throw std::invalid_argument("patch test: degree must be 1, 2 or 3");
    }
    return p;
}

}  // namespace

Problem make_patch_problem(double h, int degree, double delta1, double delta2, double s2,
                           QuadratureConfig quad) {
    Problem p;
    p.mesh = build_mesh(DomainLayout::unit_square(Splitter::TWO_REGION), h, std::max(delta1, delta2));
    p.dm = build_dof_map(p.mesh);
    p.kernel = KernelSpec::patch_coupled(s2, delta1, delta2);
    p.exact = patch_polynomial(degree);
    p.has_exact = true;

    // Both operators act as (m/2) Laplacian on polynomials up to degree 3;
    // manufacture the forcing accordingly.
    double m1 = KernelSpec::second_moment(p.kernel.piece(1, 1));
    double m2 = KernelSpec::second_moment(p.kernel.piece(2, 2));
    if (std::abs(m1 - m2) > 1e-10 * (std::abs(m1) + std::abs(m2)))
        throw std::invalid_argument("patch test: coupled kernels must share the second moment");
    Forcing f;
    Poly2 zero;
    switch (degree) {
        case 1:
            f = Forcing::uniform(zero, 2);
            break;
        case 2: {
            // -L x^2 = -(m/2) * 2 = -m
            f = Forcing::uniform(Poly2::constant(-m1), 2);
            break;
        }
        case 3: {
            // -L x^3 = -(m/2) * 6x = -3 m x
            Poly2 fx;
            fx.c[1] = -3.0 * m1;
            f = Forcing::uniform(fx, 2);
            break;
        }
    }
    Poly2 exact = p.exact;
    p.sys = assemble_dirichlet(p.mesh, p.dm, p.kernel, quad, f,
                               [exact](Vec2 x) { return exact.eval(x); });
    p.part = partition_dofs(p.dm);
    return p;
}

Problem make_bench_problem(double h, double s, double delta1, double delta2, QuadratureConfig quad) {
    Problem p;
    p.mesh = build_mesh(DomainLayout::unit_square(Splitter::TWO_REGION), h, std::max(delta1, delta2));
    p.dm = build_dof_map(p.mesh);
    p.kernel = KernelSpec::patch_coupled(s, delta1, delta2);
    p.sys = assemble_dirichlet(p.mesh, p.dm, p.kernel, quad, Forcing::constants({10.0, 10.0}),
                               [](Vec2) { return 0.0; });
    p.part = partition_dofs(p.dm);
    return p;
}

std::vector<double> full_field(const Problem& p, const std::vector<double>& u) {
    std::vector<double> field(p.dm.n_dofs(), 0.0);
    for (int i = 0; i < p.sys.n_unknowns; ++i) field[i] = u[i];
    for (int j = 0; j < p.sys.n_dirichlet; ++j) field[p.sys.n_unknowns + j] = p.sys.g[j];
    return field;
}

double eval_field(const Mesh& mesh, const DofMap& dm, const std::vector<double>& field, int elem,
                  Vec2 x) {
    auto lam = barycentric(mesh.triangle(elem), x);
    double v = 0.0;
    for (int c = 0; c < 3; ++c) v += lam[c] * field[dm.elem_dof[elem][c]];
    return v;
}

namespace {

// containing element of a point in a structured mesh (diagonal split b-d)
int locate(const Mesh& mesh, Vec2 x) {
    double fx = (x.x - mesh.origin.x) / mesh.h, fy = (x.y - mesh.origin.y) / mesh.h;
    int ci = std::min(std::max(0, static_cast<int>(std::floor(fx))), mesh.cells_x - 1);
    int cj = std::min(std::max(0, static_cast<int>(std::floor(fy))), mesh.cells_y - 1);
    double lx = fx - ci, ly = fy - cj;
    int shape = (lx + ly <= 1.0) ? 0 : 1;
    return 2 * (cj * mesh.cells_x + ci) + shape;
}

}  // namespace

double l2_distance(const Mesh& mesh_a, const DofMap& dm_a, const std::vector<double>& field_a,
                   const Mesh& mesh_b, const DofMap& dm_b, const std::vector<double>& field_b) {
    const TriRule& rule = triangle_rule(7);
    // integrate over the problem domain (the rectangle plus its
    // delta-neighborhood); the over-meshed layer corners carry no equations
    const DomainLayout& lay = mesh_a.layout;
    std::vector<double> partial(mesh_a.n_elements(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int e = 0; e < mesh_a.n_elements(); ++e) {
        Triangle t = mesh_a.triangle(e);
        Vec2 e1 = t.v[1] - t.v[0], e2 = t.v[2] - t.v[0];
        double jac = 2.0 * t.area();
        double acc = 0.0;
        for (size_t q = 0; q < rule.p.size(); ++q) {
            Vec2 x = t.v[0] + rule.p[q].x * e1 + rule.p[q].y * e2;
            double dx = std::max({0.0, lay.x0 - x.x, x.x - lay.x1});
            double dy = std::max({0.0, lay.y0 - x.y, x.y - lay.y1});
            // domain plus the flat layer bands; the rounded layer corners are
            // not resolved by the square ring and carry no reliable values
            if (std::max(dx, dy) >= mesh_a.delta || (dx > 0.0 && dy > 0.0)) continue;
            double va = eval_field(mesh_a, dm_a, field_a, e, x);
            double vb = eval_field(mesh_b, dm_b, field_b, locate(mesh_b, x), x);
            acc += rule.w[q] * jac * (va - vb) * (va - vb);
        }
        partial[e] = acc;
    }
    double acc = 0.0;
    for (double v : partial) acc += v;
    return std::sqrt(acc);
}

double l2_distance_poly(const Mesh& mesh, const DofMap& dm, const std::vector<double>& field,
                        const Poly2& p) {
    const TriRule& rule = triangle_rule(7);
    double acc = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        Triangle t = mesh.triangle(e);
        Vec2 e1 = t.v[1] - t.v[0], e2 = t.v[2] - t.v[0];
        double jac = 2.0 * t.area();
        for (size_t q = 0; q < rule.p.size(); ++q) {
            Vec2 x = t.v[0] + rule.p[q].x * e1 + rule.p[q].y * e2;
            double d = eval_field(mesh, dm, field, e, x) - p.eval(x);
            acc += rule.w[q] * jac * d * d;
        }
    }
    return std::sqrt(acc);
}

PatchReport run_patch(const Problem& p, const SchwarzConfig& cfg) {
    if (!p.has_exact) throw std::invalid_argument("run_patch: problem has no exact polynomial");
    auto [u, trace] = schwarz_solve(p.sys, p.part, cfg);
    PatchReport rep;
    rep.trace = std::move(trace);
    double mx = 0.0;
    for (int i = 0; i < p.sys.n_unknowns; ++i) {
        double pv = p.exact.eval(p.mesh.vertices[p.dm.dofs[i].vertex]);
        mx = std::max(mx, std::abs(u[i] - pv));
    }
    rep.max_error = mx;
    rep.field = full_field(p, u);
    // distance to the nodal interpolant of the exact polynomial
    std::vector<double> interp(p.dm.n_dofs());
    for (int i = 0; i < p.dm.n_dofs(); ++i)
        interp[i] = p.exact.eval(p.mesh.vertices[p.dm.dofs[i].vertex]);
    rep.l2_error = l2_distance(p.mesh, p.dm, rep.field, p.mesh, p.dm, interp);
    return rep;
}

std::vector<BenchRow> run_gmres_bench(const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    std::map<std::tuple<double, double, double>, Problem> cache;
    auto get = [&](double h, double s, double d2) -> Problem& {
        auto key = std::make_tuple(h, s, d2);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, make_bench_problem(h, s, cfg.delta1, d2, cfg.quad)).first;
        return it->second;
    };
    auto run_point = [&](double h, double s, double d2) {
        Problem& p = get(h, s, d2);
        struct V {
            const char* name;
            PrecondKind kind;
        };
        for (V v : {V{"gmres", PrecondKind::NONE}, V{"gmres-bj", PrecondKind::BLOCK_JACOBI},
                    V{"gmres-bgs", PrecondKind::BLOCK_GS}}) {
            Preconditioner M = v.kind == PrecondKind::NONE ? Preconditioner::none()
                               : v.kind == PrecondKind::BLOCK_JACOBI
                                   ? Preconditioner::block_jacobi(p.sys.A, p.part)
                                   : Preconditioner::block_gs(p.sys.A, p.part);
            auto res = gmres(p.sys.A, p.sys.b, M, cfg.tol, cfg.max_iter, cfg.restart);
            double cond = condition_estimate(p.sys.A, M);
            rows.push_back({h, s, d2, v.name, res.trace.iterations, cond});
        }
    };
    for (double h : cfg.h_sweep) run_point(h, cfg.s_base, cfg.delta1);
    for (double s : cfg.s_sweep) run_point(cfg.h_fine, s, cfg.delta1);
    for (double d2 : cfg.delta2_sweep) run_point(cfg.h_fine, cfg.s_base, d2);
    return rows;
}

HStudyResult run_h_study(const std::vector<double>& h_list, double h_ref, double tol,
                         QuadratureConfig quad) {
    HStudyResult out;
    SchwarzConfig scfg;
    scfg.outer_tol = tol;

    // reference solves
    Problem dref = make_dirichlet_problem(h_ref, 0.1, 0.5, quad);
    auto dref_field = full_field(dref, schwarz_solve(dref.sys, dref.part, scfg).first);
    Problem nref = make_neumann_problem(h_ref, 0.1, quad);
    auto nref_field = full_field(nref, schwarz_solve(nref.sys, nref.part, scfg).first);
    Problem pref = make_patch_problem(h_ref, 2, 0.1, 0.1, 0.6, quad);
    std::vector<double> pref_interp(pref.dm.n_dofs());
    for (int i = 0; i < pref.dm.n_dofs(); ++i)
        pref_interp[i] = pref.exact.eval(pref.mesh.vertices[pref.dm.dofs[i].vertex]);

    std::vector<double> hs, ed, en, ep;
    for (double h : h_list) {
        Problem d = make_dirichlet_problem(h, 0.1, 0.5, quad);
        auto df = full_field(d, schwarz_solve(d.sys, d.part, scfg).first);
        double e1 = l2_distance(dref.mesh, dref.dm, dref_field, d.mesh, d.dm, df);
        out.rows.push_back({"dirichlet", h, e1});

        Problem n = make_neumann_problem(h, 0.1, quad);
        auto nf = full_field(n, schwarz_solve(n.sys, n.part, scfg).first);
        double e2 = l2_distance(nref.mesh, nref.dm, nref_field, n.mesh, n.dm, nf);
        out.rows.push_back({"neumann", h, e2});

        Problem pp = make_patch_problem(h, 2, 0.1, 0.1, 0.6, quad);
        auto pf = full_field(pp, schwarz_solve(pp.sys, pp.part, scfg).first);
        double e3 = l2_distance(pref.mesh, pref.dm, pref_interp, pp.mesh, pp.dm, pf);
        out.rows.push_back({"patch", h, e3});

        hs.push_back(h);
        ed.push_back(e1);
        en.push_back(e2);
        ep.push_back(e3);
    }
    out.slope_dirichlet = loglog_slope(hs, ed);
    out.slope_neumann = loglog_slope(hs, en);
    out.slope_patch = loglog_slope(hs, ep);
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double residual_trace_r2(const std::vector<double>& residuals) {
    std::vector<double> k, logr;
    for (size_t i = 0; i < residuals.size(); ++i) {
        if (!(residuals[i] > 0.0)) break;
        k.push_back(static_cast<double>(i));
        logr.push_back(std::log(residuals[i]));
    }
    size_t n = k.size();
    if (n < 3) return 0.0;
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += k[i];
        sy += logr[i];
    }
    double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (k[i] - mx) * (logr[i] - my);
        sxx += (k[i] - mx) * (k[i] - mx);
    }
    double slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < n; ++i) {
        double fit = my + slope * (k[i] - mx);
        ss_res += (logr[i] - fit) * (logr[i] - fit);
        ss_tot += (logr[i] - my) * (logr[i] - my);
    }
    return ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

double loglog_r2(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double slope = loglog_slope(x, y);
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    double mx = sx / n, my = sy / n;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < n; ++i) {
        double fit = my + slope * (std::log(x[i]) - mx);
        double ly = std::log(y[i]);
        ss_res += (ly - fit) * (ly - fit);
        ss_tot += (ly - my) * (ly - my);
    }
    return ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

}  // namespace nls

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria run at desk scale; the full suite is budgeted for half an
// hour wall time on a laptop.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nls/experiments.hpp"
#include "nls/io.hpp"
#include "nls/oracle.hpp"

using namespace nls;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool ok, const std::string& detail) {
    printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", num, name.c_str(), detail.c_str());
    fflush(stdout);
    if (!ok) ++failures;
}

void run(int num, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        auto [ok, detail] = fn();
        report(num, name, ok, detail);
    } catch (const std::exception& e) {
        report(num, name, false, std::string("exception: ") + e.what());
    }
}

double seconds(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double max_asymmetry(const CSR& A) {
    DenseMatrix d = A.to_dense();
    double m = 0.0;
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < i; ++j) m = std::max(m, std::abs(d(i, j) - d(j, i)));
    return m;
}

}  // namespace

int main() {
    auto t_all = clock_type::now();

    run(1, "linear patch test exactness", []() -> std::pair<bool, std::string> {
        auto t0 = clock_type::now();
        Problem p = make_patch_problem(0.1, 1, 0.1, 0.1, 0.6);
        SchwarzConfig cfg;
        cfg.outer_tol = 1e-11;
        auto rep = run_patch(p, cfg);
        double elapsed = seconds(t0);
        bool ok = rep.trace.converged && rep.max_error <= 1e-6 && elapsed < 60.0;
        return {ok, "max error " + fmt(rep.max_error) + ", " +
                        std::to_string(rep.trace.iterations) + " iterations, " + fmt(elapsed) + " s"};
    });

    run(2, "geometric Schwarz convergence", []() -> std::pair<bool, std::string> {
        bool ok = true;
        std::ostringstream detail;
        for (double h : {0.1, 0.05}) {
            Problem pd = make_dirichlet_problem(h);
            for (auto variant : {SchwarzVariant::MULTIPLICATIVE, SchwarzVariant::ADDITIVE}) {
                SchwarzConfig cfg;
                cfg.variant = variant;
                auto trace = schwarz_solve(pd.sys, pd.part, cfg).second;
                double r2 = residual_trace_r2(trace.residuals);
                ok = ok && trace.converged && r2 >= 0.99;
                detail << "dirichlet h=" << h
                       << (variant == SchwarzVariant::MULTIPLICATIVE ? " mult" : " add")
                       << " R2=" << fmt(r2) << "; ";
            }
            Problem pn = make_neumann_problem(h);
            SchwarzConfig cfg;
            auto trace = schwarz_solve(pn.sys, pn.part, cfg).second;
            double r2 = residual_trace_r2(trace.residuals);
            ok = ok && trace.converged && r2 >= 0.99;
            detail << "neumann h=" << h << " R2=" << fmt(r2) << "; ";
        }
        return {ok, detail.str()};
    });

    run(3, "additive/multiplicative iteration ratio", []() -> std::pair<bool, std::string> {
        Problem p = make_dirichlet_problem(0.1);
        SchwarzConfig m;
        auto tm = schwarz_solve(p.sys, p.part, m).second;
        SchwarzConfig a;
        a.variant = SchwarzVariant::ADDITIVE;
        auto ta = schwarz_solve(p.sys, p.part, a).second;
        double ratio = static_cast<double>(ta.iterations) / tm.iterations;
        bool ok = tm.converged && ta.converged && ratio >= 1.5 && ratio <= 3.0;
        return {ok, "multiplicative " + std::to_string(tm.iterations) + ", additive " +
                        std::to_string(ta.iterations) + ", ratio " + fmt(ratio)};
    });

    run(4, "block-iteration equivalence (bitwise)", []() -> std::pair<bool, std::string> {
        int checked = 0;
        auto equal_iterates = [&](const SparseSystem& sys, const BlockPartition& part,
                                  SchwarzVariant v, int k) {
            SchwarzConfig cfg;
            cfg.variant = v;
            cfg.outer_tol = 1e-300;
            cfg.max_outer = k;
            cfg.record_iterates = true;
            auto mine = schwarz_solve(sys, part, cfg).second.iterates;
            auto ref =
                oracle::dense_block_iterate(oracle::DenseSystem::from_sparse(sys), part, v, k);
            if (mine.size() != ref.size()) return false;
            for (size_t it = 0; it < mine.size(); ++it)
                for (size_t i = 0; i < mine[it].size(); ++i)
                    if (mine[it][i] != ref[it][i]) return false;
            ++checked;
            return true;
        };
        bool ok = true;
        for (double h : {0.5, 0.25}) {
            Problem p = make_dirichlet_problem(h);
            if (p.sys.n_unknowns > 100) return {false, "mesh not small enough"};
            ok = ok && equal_iterates(p.sys, p.part, SchwarzVariant::MULTIPLICATIVE, 12);
            ok = ok && equal_iterates(p.sys, p.part, SchwarzVariant::ADDITIVE, 12);
        }
        Problem pn = make_neumann_problem(0.25);
        ok = ok && equal_iterates(pn.sys, pn.part, SchwarzVariant::MULTIPLICATIVE, 10);
        Problem pp = make_patch_problem(0.25, 1);
        ok = ok && equal_iterates(pp.sys, pp.part, SchwarzVariant::MULTIPLICATIVE, 12);
        ok = ok && equal_iterates(pp.sys, pp.part, SchwarzVariant::ADDITIVE, 12);
        return {ok, std::to_string(checked) + " iterate sequences identical"};
    });

    run(5, "preconditioner benchmark trends", []() -> std::pair<bool, std::string> {
        auto t0 = clock_type::now();
        BenchConfig cfg;  // h {0.1,0.05,0.025}, s {0.2,0.5,0.8}, delta2 {0.1,0.05,0.025}
        auto rows = run_gmres_bench(cfg);
        struct Point {
            int it_none = 0, it_bj = 0, it_bgs = 0;
            double k_none = 0, k_bj = 0, k_bgs = 0;
        };
        std::map<std::tuple<double, double, double>, Point> pts;
        for (const auto& r : rows) {
            Point& p = pts[{r.h, r.s, r.delta2}];
            if (r.solver == "gmres") {
                p.it_none = r.iterations;
                p.k_none = r.cond;
            } else if (r.solver == "gmres-bj") {
                p.it_bj = r.iterations;
                p.k_bj = r.cond;
            } else {
                p.it_bgs = r.iterations;
                p.k_bgs = r.cond;
            }
        }
        bool ok = true;
        std::ostringstream detail;
        for (const auto& [key, p] : pts) {
            auto [h, s, d2] = key;
            std::ostringstream tag;
            tag << "(h=" << h << ",s=" << s << ",d2=" << d2 << ")";
            if (p.it_none < 3 * p.it_bj) {
                ok = false;
                detail << tag.str() << " iters " << p.it_none << " < 3x" << p.it_bj << "; ";
            }
            if (p.it_bj < p.it_bgs) {
                ok = false;
                detail << tag.str() << " bj<bgs iters; ";
            }
            if (p.k_none < 10.0 * p.k_bj) {
                ok = false;
                detail << tag.str() << " kA " << fmt(p.k_none) << " < 10x" << fmt(p.k_bj) << "; ";
            }
            if (p.k_bj < p.k_bgs) {
                ok = false;
                detail << tag.str() << " kBJ<kBGS; ";
            }
            if (p.it_bgs > 30) {
                ok = false;
                detail << tag.str() << " bgs iters " << p.it_bgs << " > 30; ";
            }
            if (p.k_bgs > 40.0) {
                ok = false;
                detail << tag.str() << " kBGS " << fmt(p.k_bgs) << " > 40; ";
            }
        }
        // strict increase along the sweeps
        auto pt = [&](double h, double s, double d2) { return pts.at({h, s, d2}); };
        auto increasing = [&](std::vector<Point> seq, const char* name) {
            for (size_t i = 1; i < seq.size(); ++i)
                if (!(seq[i].it_none > seq[i - 1].it_none && seq[i].k_none > seq[i - 1].k_none)) {
                    ok = false;
                    detail << name << " sweep not strictly increasing; ";
                    return;
                }
        };
        increasing({pt(0.1, 0.5, 0.1), pt(0.05, 0.5, 0.1), pt(0.025, 0.5, 0.1)}, "h");
        increasing({pt(0.025, 0.2, 0.1), pt(0.025, 0.5, 0.1), pt(0.025, 0.8, 0.1)}, "s");
        increasing({pt(0.025, 0.5, 0.1), pt(0.025, 0.5, 0.05), pt(0.025, 0.5, 0.025)}, "delta2");
        double elapsed = seconds(t0);
        if (elapsed >= 1800.0) {
            ok = false;
            detail << "runtime " << fmt(elapsed) << " s over budget; ";
        }
        if (ok) detail << "all orderings hold, " << fmt(elapsed) << " s";
        return {ok, detail.str()};
    });

    run(6, "quadratic h-convergence", []() -> std::pair<bool, std::string> {
        auto res = run_h_study({0.2, 0.1, 0.05}, 0.025, 1e-11);
        auto in_band = [](double s) { return s >= 1.7 && s <= 2.3; };
        bool ok = in_band(res.slope_dirichlet) && in_band(res.slope_neumann) &&
                  in_band(res.slope_patch);
        return {ok, "slopes: dirichlet " + fmt(res.slope_dirichlet) + ", neumann " +
                        fmt(res.slope_neumann) + ", patch " + fmt(res.slope_patch)};
    });

    run(7, "assembly invariants", []() -> std::pair<bool, std::string> {
        bool ok = true;
        std::ostringstream detail;

        Problem pd = make_dirichlet_problem(0.25);
        double asym = max_asymmetry(pd.sys.A) / pd.sys.A.max_abs();
        ok = ok && asym <= 1e-10;
        detail << "symmetry " << fmt(asym) << "; ";

        auto eig = symmetric_eigenvalues(pd.sys.A.to_dense());
        ok = ok && eig.front() > 0.0;
        detail << "min eig " << fmt(eig.front()) << "; ";
        Problem pn = make_neumann_problem(0.25);
        auto eig_n = symmetric_eigenvalues(pn.sys.A.to_dense());
        ok = ok && eig_n.front() > 0.0;

        // row-sum nullspace, relative to each absolute row sum
        std::vector<double> ones_u(pd.sys.n_unknowns, 1.0), ones_b(pd.sys.n_dirichlet, 1.0);
        auto r1 = pd.sys.A.matvec(ones_u);
        auto r2 = pd.sys.A_I.matvec(ones_b);
        double worst = 0.0;
        for (int i = 0; i < pd.sys.n_unknowns; ++i) {
            double abs_sum = 0.0;
            for (int k = pd.sys.A.rowptr[i]; k < pd.sys.A.rowptr[i + 1]; ++k)
                abs_sum += std::abs(pd.sys.A.val[k]);
            for (int k = pd.sys.A_I.rowptr[i]; k < pd.sys.A_I.rowptr[i + 1]; ++k)
                abs_sum += std::abs(pd.sys.A_I.val[k]);
            worst = std::max(worst, std::abs(r1[i] + r2[i]) / abs_sum);
        }
        ok = ok && worst <= 1e-10;
        detail << "row sums " << fmt(worst) << "; ";

        // oracle Frobenius agreement on small meshes
        double worst_frob = 0.0;
        for (auto splitter : {Splitter::SINGLE, Splitter::TWO_REGION}) {
            Mesh mesh = build_mesh(DomainLayout::unit_square(splitter), 0.5, 0.5);
            DofMap dm = build_dof_map(mesh);
            KernelSpec kernel(mesh.n_regions, 4.0);
            KernelPiece pc;
            pc.profile = Profile::CONSTANT;
            pc.coef = 1.375;
            pc.delta = 4.0;
            kernel.set_all(pc);
            kernel.finalize();
            SparseSystem sys =
                assemble_dirichlet(mesh, dm, kernel, {}, Forcing::constants({1.0, 1.0, 1.0}),
                                   [](Vec2) { return 0.0; });
            auto ora = oracle::dense_assemble(mesh, dm, kernel, 4);
            DenseMatrix mine = sys.A.to_dense();
            double num = 0.0, den = 0.0;
            for (size_t i = 0; i < mine.a.size(); ++i) {
                double d = mine.a[i] - ora.A.a[i];
                num += d * d;
                den += ora.A.a[i] * ora.A.a[i];
            }
            worst_frob = std::max(worst_frob, std::sqrt(num / den));
        }
        ok = ok && worst_frob <= 1e-8;
        detail << "oracle frobenius " << fmt(worst_frob);
        return {ok, detail.str()};
    });

    run(8, "kernel analytics", []() -> std::pair<bool, std::string> {
        bool ok = true;
        double c = scaling_constant(0.5, 0.1);
        ok = ok && std::abs(c - 10.0 / M_PI) <= 1e-12 * (10.0 / M_PI);

        KernelPiece constant;
        constant.profile = Profile::CONSTANT;
        constant.coef = 4.0 / (M_PI * 1e-4);
        constant.delta = 0.1;
        KernelPiece frac;
        frac.profile = Profile::FRACTIONAL;
        frac.coef = c;
        frac.s = 0.5;
        frac.delta = 0.1;
        double m1 = KernelSpec::second_moment(constant);
        double m2 = KernelSpec::second_moment(frac);
        ok = ok && std::abs(m1 - 1.0) <= 1e-12 && std::abs(m2 - 1.0) <= 1e-12;

        // independent numerical cross-check (polar quadrature with a radial
        // substitution absorbing the fractional weight)
        auto numeric = [](const KernelPiece& pc) {
            const Gauss1D& gr = gauss_legendre(64);
            int na = 256;
            double kappa = pc.profile == Profile::FRACTIONAL ? 1.0 / (2.0 - 2.0 * pc.s) : 1.0;
            double acc = 0.0;
            for (int a = 0; a < na; ++a) {
                double th = 2.0 * M_PI * (a + 0.5) / na;
                double c2 = std::cos(th) * std::cos(th);
                for (int i = 0; i < 64; ++i) {
                    double t = gr.x[i];
                    double r = pc.delta * std::pow(t, kappa);
                    double dr = pc.delta * kappa * std::pow(t, kappa - 1.0) * gr.w[i];
                    double g = pc.profile == Profile::CONSTANT
                                   ? pc.coef
                                   : pc.coef * std::pow(r, -2.0 - 2.0 * pc.s);
                    acc += dr * (2.0 * M_PI / na) * r * r * r * c2 * g;
                }
            }
            return acc;
        };
        double n1 = numeric(constant), n2 = numeric(frac);
        ok = ok && std::abs(n1 - 1.0) <= 1e-6 && std::abs(n2 - 1.0) <= 1e-6;
        return {ok, "c_delta(0.5,0.1) = " + fmt(c) + "; moments " + fmt(m1) + "/" + fmt(m2) +
                        ", numeric " + fmt(n1) + "/" + fmt(n2)};
    });

    printf("%d criteria failed, total %.0f s\n", failures, seconds(t_all));
    return failures;
}

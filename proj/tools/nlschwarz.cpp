// Command-line driver for the nonlocal Schwarz experiments: Dirichlet and
// Neumann solves, patch tests, the preconditioned-GMRES benchmark and the
// mesh-refinement study. All tabular output is CSV.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nls/experiments.hpp"
#include "nls/io.hpp"
#include "nls/oracle.hpp"

using namespace nls;

namespace {

struct CommonOpts {
    double h = 0.1;
    double delta = 0.1;
    double delta2 = 0.0;  // 0: same as delta
    double s = 0.5;
    std::string solver = "multiplicative";
    double tol = 1e-9;
    double inner_tol = 1e-12;
    int max_iters = 10000;
    double theta = 1.0;
    std::string out;
    std::string dump_mesh, dump_matrix, dump_solution;
    std::vector<std::string> kernel_pieces;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--h", o.h, "mesh size");
    cmd->add_option("--delta", o.delta, "interaction horizon");
    cmd->add_option("--delta2", o.delta2, "second horizon (fractional piece)");
    cmd->add_option("--s", o.s, "fractional order");
    cmd->add_option("--solver", o.solver,
                    "multiplicative | additive | gmres | gmres-bj | gmres-bgs");
    cmd->add_option("--tol", o.tol, "outer residual tolerance");
    cmd->add_option("--inner-tol", o.inner_tol, "subproblem solver tolerance");
    cmd->add_option("--max-iters", o.max_iters, "outer iteration cap");
    cmd->add_option("--theta", o.theta, "additive damping factor");
    cmd->add_option("--out", o.out, "CSV output path (default stdout)");
    cmd->add_option("--dump-mesh", o.dump_mesh, "write the mesh as text");
    cmd->add_option("--dump-matrix", o.dump_matrix, "write A in MatrixMarket format");
    cmd->add_option("--dump-solution", o.dump_solution, "write the nodal solution");
    cmd->add_option("--kernel-piece", o.kernel_pieces,
                    "override a kernel piece: RX:RY:profile:formula:k[:s=S][:delta=D]");
    cmd->set_config("--config", "", "flat key=value configuration file");
}

// kernel piece override, e.g. 1:2:fractional:c_delta:10:s=0.5:delta=0.1
void apply_kernel_overrides(KernelSpec& kernel, const std::vector<std::string>& specs) {
    for (const auto& text : specs) {
        std::vector<std::string> tok;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':')) tok.push_back(part);
        if (tok.size() < 5)
            throw CLI::ValidationError("--kernel-piece", "expected RX:RY:profile:formula:k");
        int rx = std::stoi(tok[0]), ry = std::stoi(tok[1]);
        KernelPiece pc;
        pc.delta = kernel.delta();
        pc.s = 0.5;
        for (size_t i = 5; i < tok.size(); ++i) {
            if (tok[i].rfind("s=", 0) == 0) pc.s = std::stod(tok[i].substr(2));
            if (tok[i].rfind("delta=", 0) == 0) pc.delta = std::stod(tok[i].substr(6));
        }
        if (tok[2] == "constant")
            pc.profile = Profile::CONSTANT;
        else if (tok[2] == "fractional")
            pc.profile = Profile::FRACTIONAL;
        else
            throw CLI::ValidationError("--kernel-piece", "profile must be constant|fractional");
        double k = std::stod(tok[4]);
        if (tok[3] == "literal")
            pc.coef = k;
        else if (tok[3] == "c_delta")
            pc.coef = k * scaling_constant(pc.s, pc.delta);
        else if (tok[3] == "four_over_pi_delta4")
            pc.coef = k * 4.0 / (M_PI * std::pow(pc.delta, 4.0));
        else
            throw CLI::ValidationError("--kernel-piece",
                                       "formula must be literal|c_delta|four_over_pi_delta4");
        kernel.set_piece(rx, ry, pc);
    }
    kernel.finalize();
}

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
    if (path.empty()) return nullptr;
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f) throw std::runtime_error("cannot open output file: " + path);
    return f;
}

void dump_artifacts(const CommonOpts& o, const Problem& p, const std::vector<double>* u) {
    if (!o.dump_mesh.empty()) {
        std::ofstream f(o.dump_mesh);
        p.mesh.export_text(f);
    }
    if (!o.dump_matrix.empty()) {
        std::ofstream f(o.dump_matrix);
        export_matrix_market(p.sys.A, f);
    }
    if (!o.dump_solution.empty() && u) {
        std::ofstream f(o.dump_solution);
        auto field = full_field(p, *u);
        f << "# x y owner value\n";
        for (int d = 0; d < p.dm.n_dofs(); ++d) {
            Vec2 v = p.mesh.vertices[p.dm.dofs[d].vertex];
            f << format_double(v.x) << " " << format_double(v.y) << " " << p.dm.dofs[d].owner << " "
              << format_double(field[d]) << "\n";
        }
    }
}

// Schwarz or preconditioned-GMRES solve of an assembled problem
std::pair<std::vector<double>, IterationTrace> run_solver(const Problem& p, const CommonOpts& o) {
    if (o.solver == "multiplicative" || o.solver == "additive") {
        SchwarzConfig cfg;
        cfg.variant =
            o.solver == "additive" ? SchwarzVariant::ADDITIVE : SchwarzVariant::MULTIPLICATIVE;
        cfg.outer_tol = o.tol;
        cfg.inner_tol = o.inner_tol;
        cfg.max_outer = o.max_iters;
        cfg.theta = o.theta;
        return schwarz_solve(p.sys, p.part, cfg);
    }
    Preconditioner M = Preconditioner::none();
    if (o.solver == "gmres-bj")
        M = Preconditioner::block_jacobi(p.sys.A, p.part);
    else if (o.solver == "gmres-bgs")
        M = Preconditioner::block_gs(p.sys.A, p.part);
    else if (o.solver != "gmres")
        throw CLI::ValidationError("--solver", "unknown solver " + o.solver);
    auto res = gmres(p.sys.A, p.sys.b, M, o.tol, o.max_iters);
    return {std::move(res.x), std::move(res.trace)};
}

int report_trace(const CommonOpts& o, const IterationTrace& trace,
                 const std::vector<std::string>& notes) {
    auto file = open_out(o.out);
    std::ostream& os = file ? *file : std::cout;
    export_trace_csv(trace, os, notes);
    std::cerr << (trace.converged ? "converged" : "NOT converged") << " after " << trace.iterations
              << " iterations, residual " << format_double(trace.residuals.back()) << "\n";
    return trace.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal diffusion solver toolkit: Schwarz methods and preconditioned GMRES"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonOpts dir_o, neu_o, patch_o, bench_o, study_o;
    patch_o.s = 0.6;
    patch_o.tol = 1e-11;
    bench_o.tol = 1e-10;
    study_o.tol = 1e-11;
    int patch_degree = 1;
    double study_ref = 0.025;
    std::vector<double> study_h{0.2, 0.1, 0.05};
    int bench_restart = 20;

    auto* dir = app.add_subcommand("solve-dirichlet",
                                   "three-subdomain Dirichlet problem, singular symmetric kernel");
    add_common(dir, dir_o);

    auto* neu =
        app.add_subcommand("solve-neumann", "two-subdomain Neumann problem, constant kernel");
    add_common(neu, neu_o);

    auto* patch =
        app.add_subcommand("patch-test", "coupled constant/fractional kernel patch test");
    add_common(patch, patch_o);
    patch->add_option("--degree", patch_degree, "patch polynomial degree (1, 2 or 3)");

    auto* bench = app.add_subcommand("gmres-bench",
                                     "preconditioner benchmark sweeps over h, s and delta2");
    add_common(bench, bench_o);
    bench->add_option("--restart", bench_restart, "GMRES restart length (0 = full)");

    auto* study = app.add_subcommand("h-study", "L2 self-convergence study under mesh refinement");
    add_common(study, study_o);
    study->add_option("--h-list", study_h, "mesh sizes to compare");
    study->add_option("--ref", study_ref, "reference mesh size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dir) {
            Problem p = make_dirichlet_problem(dir_o.h, dir_o.delta, dir_o.s);
            if (!dir_o.kernel_pieces.empty()) {
                apply_kernel_overrides(p.kernel, dir_o.kernel_pieces);
                p.sys = assemble_dirichlet(p.mesh, p.dm, p.kernel, {},
                                           Forcing::constants({5.0, 5.0, 1.0}),
                                           [](Vec2) { return 0.0; });
            }
            auto [u, trace] = run_solver(p, dir_o);
            dump_artifacts(dir_o, p, &u);
            return report_trace(dir_o, trace, {});
        }
        if (*neu) {
            Problem p = make_neumann_problem(neu_o.h, neu_o.delta);
            if (neu_o.solver != "multiplicative")
                std::cerr << "note: the Neumann study uses the multiplicative sweep\n";
            auto [u, trace] = run_solver(p, neu_o);
            dump_artifacts(neu_o, p, &u);
            return report_trace(neu_o, trace, {"gN = 0 (assumed)"});
        }
        if (*patch) {
            double d2 = patch_o.delta2 > 0 ? patch_o.delta2 : patch_o.delta;
            Problem p = make_patch_problem(patch_o.h, patch_degree, patch_o.delta, d2, patch_o.s);
            SchwarzConfig cfg;
            cfg.outer_tol = patch_o.tol;
            cfg.inner_tol = patch_o.inner_tol;
            cfg.max_outer = patch_o.max_iters;
            auto rep = run_patch(p, cfg);
            dump_artifacts(patch_o, p, &rep.field);
            std::cout << "degree " << patch_degree
                      << " patch: max|u - interpolant| = " << format_double(rep.max_error)
                      << ", L2 distance = " << format_double(rep.l2_error) << ", "
                      << rep.trace.iterations << " iterations\n";
            if (!patch_o.out.empty()) {
                auto file = open_out(patch_o.out);
                export_trace_csv(rep.trace, *file, {});
            }
            return rep.trace.converged ? 0 : 1;
        }
        if (*bench) {
            BenchConfig cfg;
            cfg.tol = bench_o.tol;
            cfg.restart = bench_restart;
            auto rows = run_gmres_bench(cfg);
            auto file = open_out(bench_o.out);
            std::ostream& os = file ? *file : std::cout;
            os << "h,s,delta2,solver,iterations,cond_estimate\n";
            for (const auto& r : rows)
                os << format_double(r.h) << "," << format_double(r.s) << ","
                   << format_double(r.delta2) << "," << r.solver << "," << r.iterations << ","
                   << format_double(r.cond) << "\n";
            return 0;
        }
        if (*study) {
            auto res = run_h_study(study_h, study_ref, study_o.tol);
            auto file = open_out(study_o.out);
            std::ostream& os = file ? *file : std::cout;
            os << "series,h,l2_error\n";
            for (const auto& r : res.rows)
                os << r.series << "," << format_double(r.h) << "," << format_double(r.l2) << "\n";
            std::cerr << "slopes: dirichlet " << format_double(res.slope_dirichlet) << ", neumann "
                      << format_double(res.slope_neumann) << ", patch "
                      << format_double(res.slope_patch) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

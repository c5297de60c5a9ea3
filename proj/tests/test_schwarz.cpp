#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/experiments.hpp"
#include "nls/oracle.hpp"
#include "nls/schwarz.hpp"

using namespace nls;

namespace {

SchwarzConfig config(SchwarzVariant v, double tol = 1e-9) {
    SchwarzConfig c;
    c.variant = v;
    c.outer_tol = tol;
    return c;
}

// run exactly k sweeps (tolerance never reached)
std::vector<std::vector<double>> run_k_sweeps(const SparseSystem& sys, const BlockPartition& part,
                                              SchwarzVariant v, int k) {
    SchwarzConfig c = config(v, 1e-300);
    c.max_outer = k;
    c.record_iterates = true;
    return schwarz_solve(sys, part, c).second.iterates;
}

}  // namespace

TEST_CASE("partition examples") {
    // two regions: blocks cover the interior dofs
    Problem p2 = make_patch_problem(0.25, 1);
    CHECK(p2.part.n_blocks() == 2);
    CHECK(static_cast<int>(p2.part.blocks[0].size() + p2.part.blocks[1].size()) ==
          p2.sys.n_unknowns);

    // three regions: pairwise disjoint
    Problem p3 = make_dirichlet_problem(0.25);
    CHECK(p3.part.n_blocks() == 3);
    std::vector<int> seen(p3.sys.n_unknowns, 0);
    for (const auto& blk : p3.part.blocks)
        for (int d : blk) seen[d]++;
    for (int c : seen) CHECK(c == 1);

    // unsplit interface hats cannot be assigned to a subdomain
    Mesh mesh = build_mesh(DomainLayout::unit_square(Splitter::TWO_REGION), 0.25, 0.1);
    DofMap unsplit = build_dof_map(mesh, /*split=*/false);
    CHECK_THROWS_AS(partition_dofs(unsplit), ConfigError);

    // a declared subdomain with no dofs is rejected
    DofMap fake = build_dof_map(mesh);
    fake.n_blocks = 3;
    CHECK_THROWS_AS(partition_dofs(fake), ConfigError);
}

TEST_CASE("exact initial guess converges in zero iterations") {
    Problem p = make_dirichlet_problem(0.25);
    auto exact = oracle::dense_solve(oracle::DenseSystem::from_sparse(p.sys));
    auto [u, trace] =
        schwarz_solve(p.sys, p.part, config(SchwarzVariant::MULTIPLICATIVE, 1e-8), exact);
    CHECK(trace.iterations == 0);
    CHECK(trace.converged);
    (void)u;
}

TEST_CASE("single block reduces to a direct solve") {
    Problem p = make_dirichlet_problem(0.25);
    auto part = single_block(p.sys.n_unknowns);
    auto [u, trace] = schwarz_solve(p.sys, part, config(SchwarzVariant::MULTIPLICATIVE));
    CHECK(trace.iterations == 1);
    CHECK(trace.converged);
    (void)u;
}

TEST_CASE("iterates match the dense block iteration exactly") {
    // multiplicative vs block-Gauss-Seidel and additive vs block-Jacobi on
    // small meshes, value-for-value
    for (double h : {0.5, 0.25}) {
        for (auto variant : {SchwarzVariant::MULTIPLICATIVE, SchwarzVariant::ADDITIVE}) {
            Problem p = make_dirichlet_problem(h);
            REQUIRE(p.sys.n_unknowns <= 100);
            int k = 12;
            auto mine = run_k_sweeps(p.sys, p.part, variant, k);
            auto ref = oracle::dense_block_iterate(oracle::DenseSystem::from_sparse(p.sys), p.part,
                                                   variant, k);
            REQUIRE(mine.size() == ref.size());
            for (size_t it = 0; it < mine.size(); ++it)
                for (int i = 0; i < p.sys.n_unknowns; ++i) {
                    CAPTURE(h);
                    CAPTURE(it);
                    CAPTURE(i);
                    CHECK(mine[it][i] == ref[it][i]);
                }
        }
    }
    // the Neumann system exercises layer blocks
    Problem pn = make_neumann_problem(0.25);
    REQUIRE(pn.sys.n_unknowns <= 100);
    auto mine = run_k_sweeps(pn.sys, pn.part, SchwarzVariant::MULTIPLICATIVE, 10);
    auto ref = oracle::dense_block_iterate(oracle::DenseSystem::from_sparse(pn.sys), pn.part,
                                           SchwarzVariant::MULTIPLICATIVE, 10);
    for (size_t it = 0; it < mine.size(); ++it)
        for (int i = 0; i < pn.sys.n_unknowns; ++i) CHECK(mine[it][i] == ref[it][i]);
}

TEST_CASE("monotone residual and variant agreement on an SPD system") {
    Problem p = make_dirichlet_problem(0.25);
    auto [um, tm] = schwarz_solve(p.sys, p.part, config(SchwarzVariant::MULTIPLICATIVE));
    CHECK(tm.converged);
    for (size_t k = 1; k < tm.residuals.size(); ++k)
        CHECK(tm.residuals[k] <= tm.residuals[k - 1] + 1e-12);

    auto [ua, ta] = schwarz_solve(p.sys, p.part, config(SchwarzVariant::ADDITIVE));
    CHECK(ta.converged);
    double diff = 0.0;
    for (int i = 0; i < p.sys.n_unknowns; ++i) diff += (um[i] - ua[i]) * (um[i] - ua[i]);
    CHECK(std::sqrt(diff) <= 10.0 * 1e-9);
}

TEST_CASE("two-block additive interleaves two multiplicative sweeps") {
    // with u0 = 0 the block-1 components of the additive iterates at odd
    // sweeps equal the multiplicative block-1 iterates, value for value
    Problem p = make_patch_problem(0.25, 1);
    REQUIRE(p.part.n_blocks() == 2);
    int k = 9;
    auto add = run_k_sweeps(p.sys, p.part, SchwarzVariant::ADDITIVE, 2 * k + 1);
    auto mul = run_k_sweeps(p.sys, p.part, SchwarzVariant::MULTIPLICATIVE, k + 1);
    for (int m = 0; m <= k; ++m)
        for (int d : p.part.blocks[0]) CHECK(add[2 * m + 1][d] == mul[m + 1][d]);
}

TEST_CASE("geometric convergence of the residual trace") {
    Problem p = make_dirichlet_problem(0.25);
    auto [u, trace] = schwarz_solve(p.sys, p.part, config(SchwarzVariant::MULTIPLICATIVE, 1e-11));
    REQUIRE(trace.converged);
    REQUIRE(trace.residuals.size() >= 6);
    CHECK(residual_trace_r2(trace.residuals) >= 0.99);
    (void)u;
}

TEST_CASE("divergence and singular blocks are reported") {
    // block-Jacobi diverges when off-diagonal coupling dominates
    SparseSystem sys;
    sys.n_unknowns = 2;
    sys.A.n = sys.A.m = 2;
    sys.A.rowptr = {0, 2, 4};
    sys.A.col = {0, 1, 0, 1};
    sys.A.val = {1.0, 2.0, 2.0, 1.0};
    sys.f = {1.0, 1.0};
    sys.b = sys.f;
    BlockPartition part;
    part.blocks = {{0}, {1}};
    part.block_of = {0, 1};
    SchwarzConfig cfg = config(SchwarzVariant::ADDITIVE, 1e-12);
    CHECK_THROWS_AS(schwarz_solve(sys, part, cfg), DivergenceError);

    SparseSystem sing = sys;
    sing.A.val = {0.0, 1.0, 1.0, 0.0};
    CHECK_THROWS_AS(schwarz_solve(sing, part, cfg), FactorizationError);
}

TEST_CASE("inner gmres block solver matches the direct one to tolerance") {
    Problem p = make_dirichlet_problem(0.25);
    SchwarzConfig direct = config(SchwarzVariant::MULTIPLICATIVE, 1e-9);
    SchwarzConfig inner = direct;
    inner.inner_solver = InnerSolver::GMRES;
    inner.inner_tol = 1e-12;
    auto [ud, td] = schwarz_solve(p.sys, p.part, direct);
    auto [ug, tg] = schwarz_solve(p.sys, p.part, inner);
    CHECK(tg.converged);
    double diff = 0.0;
    for (int i = 0; i < p.sys.n_unknowns; ++i) diff = std::max(diff, std::abs(ud[i] - ug[i]));
    CHECK(diff <= 1e-7);
}

TEST_CASE("damped additive sweep still converges") {
    Problem p = make_dirichlet_problem(0.25);
    SchwarzConfig cfg = config(SchwarzVariant::ADDITIVE, 1e-9);
    cfg.theta = 0.7;
    auto [u, trace] = schwarz_solve(p.sys, p.part, cfg);
    CHECK(trace.converged);
    auto exact = oracle::dense_solve(oracle::DenseSystem::from_sparse(p.sys));
    for (int i = 0; i < p.sys.n_unknowns; ++i)
        CHECK(u[i] == doctest::Approx(exact[i]).epsilon(1e-5));
}

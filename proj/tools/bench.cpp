// Benchmark of the OpenMP-parallel kernels against single-threaded runs:
// assembly, sparse matvec and the additive Schwarz sweep. The parallel
// assembly is bit-reproducible, so the outputs are also compared exactly.
#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nls/experiments.hpp"

using namespace nls;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

SparseSystem assemble_once(double h) {
    Mesh mesh = build_mesh(DomainLayout::unit_square(Splitter::THREE_REGION), h, 0.1);
    DofMap dm = build_dof_map(mesh);
    KernelSpec kernel = KernelSpec::dirichlet_three_region(0.5, 0.1);
    return assemble_dirichlet(mesh, dm, kernel, {}, Forcing::constants({5.0, 5.0, 1.0}),
                              [](Vec2) { return 0.0; });
}

}  // namespace

int main(int argc, char** argv) {
    double h = argc > 1 ? atof(argv[1]) : 0.05;
    int max_threads = threads();
    printf("mesh h = %g, up to %d threads\n", h, max_threads);

    set_threads(1);
    auto t0 = clock_type::now();
    SparseSystem serial = assemble_once(h);
    double t_serial = seconds(t0);
    printf("assembly   1 thread : %7.2f s  (n = %d, nnz = %d)\n", t_serial, serial.A.n,
           serial.A.rowptr[serial.A.n]);

    set_threads(max_threads);
    t0 = clock_type::now();
    SparseSystem parallel = assemble_once(h);
    double t_par = seconds(t0);
    printf("assembly  %2d threads: %7.2f s  (speedup %.2fx)\n", max_threads, t_par,
           t_serial / t_par);

    bool identical = serial.A.val.size() == parallel.A.val.size() &&
                     std::memcmp(serial.A.val.data(), parallel.A.val.data(),
                                 serial.A.val.size() * sizeof(double)) == 0 &&
                     serial.A.col == parallel.A.col && serial.b == parallel.b;
    printf("bitwise reproducible across thread counts: %s\n", identical ? "yes" : "NO");

    // sparse matvec
    std::vector<double> x(serial.A.n, 1.0), y(serial.A.n);
    int reps = 2000;
    for (int nt : {1, max_threads}) {
        set_threads(nt);
        t0 = clock_type::now();
        for (int r = 0; r < reps; ++r) serial.A.matvec(x.data(), y.data());
        printf("matvec   %2d threads: %7.3f ms/op\n", nt, seconds(t0) / reps * 1e3);
    }

    // additive Schwarz sweeps (block solves run concurrently)
    Mesh mesh = build_mesh(DomainLayout::unit_square(Splitter::THREE_REGION), h, 0.1);
    DofMap dm = build_dof_map(mesh);
    BlockPartition part = partition_dofs(dm);
    SchwarzConfig cfg;
    cfg.variant = SchwarzVariant::ADDITIVE;
    cfg.outer_tol = 1e-300;
    cfg.max_outer = 30;
    std::vector<double> first;
    for (int nt : {1, max_threads}) {
        set_threads(nt);
        t0 = clock_type::now();
        auto [u, trace] = schwarz_solve(serial, part, cfg);
        printf("schwarz  %2d threads: %7.3f s for %d additive sweeps\n", nt, seconds(t0),
               trace.iterations);
        if (first.empty())
            first = u;
        else
            printf("additive sweep thread-invariant: %s\n", first == u ? "yes" : "NO");
    }
    return identical ? 0 : 1;
}

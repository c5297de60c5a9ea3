#ifndef NLS_ORACLE_HPP
#define NLS_ORACLE_HPP

#include <vector>

#include "nls/assembly.hpp"
#include "nls/dense.hpp"
#include "nls/schwarz.hpp"

namespace nls {
// Brute-force, single-threaded reference implementations backing the test
// suite. The assembly here shares the kernel definitions but none of the
// production quadrature machinery.
namespace oracle {

constexpr int kMaxDofs = 5000;

struct DenseSystem {
    DenseMatrix A;
    std::vector<double> b;
    int n = 0;

    static DenseSystem from_sparse(const SparseSystem& sys);
};

struct DenseAssembly {
    DenseMatrix A;    // unknowns x unknowns
    DenseMatrix A_I;  // unknowns x Dirichlet dofs
};

// Independent re-integration of every stiffness entry for the constrained
// problem: full O(E^2) element-pair loop (no pruning), symmetric-form
// integrand, quadrature refined `refine`-fold via element subdivision with
// graded bisection toward the diagonal singularity. Symmetric kernels only.
DenseAssembly dense_assemble(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel,
                             int refine = 4);

// k iterations of textbook dense block-Jacobi or block-Gauss-Seidel; returns
// the iterates u^0 .. u^k.
std::vector<std::vector<double>> dense_block_iterate(const DenseSystem& sys,
                                                     const BlockPartition& part,
                                                     SchwarzVariant variant, int k,
                                                     std::vector<double> u0 = {});

// Dense direct solve of the mirrored system.
std::vector<double> dense_solve(const DenseSystem& sys);

}  // namespace oracle
}  // namespace nls

#endif

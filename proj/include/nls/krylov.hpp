#ifndef NLS_KRYLOV_HPP
#define NLS_KRYLOV_HPP

#include <memory>
#include <vector>

#include "nls/csr.hpp"
#include "nls/schwarz.hpp"

namespace nls {

enum class PrecondKind { NONE, BLOCK_JACOBI, BLOCK_GS };

// Left preconditioner built from the diagonal blocks (block-Jacobi) or the
// lower block triangle (block-Gauss-Seidel) of the partitioned matrix.
class Preconditioner {
public:
    static Preconditioner none();
    static Preconditioner block_jacobi(const CSR& A, const BlockPartition& part);
    static Preconditioner block_gs(const CSR& A, const BlockPartition& part);

    PrecondKind kind() const { return kind_; }
    // out = M^{-1} v
    void apply(const double* v, double* out) const;
    std::vector<double> apply(const std::vector<double>& v) const;

private:
    PrecondKind kind_ = PrecondKind::NONE;
    const CSR* a_ = nullptr;
    BlockPartition part_;
    std::shared_ptr<BlockSolver> blocks_;
};

struct GmresResult {
    std::vector<double> x;
    IterationTrace trace;
};

// Full (restart = 0) left-preconditioned GMRES with modified Gram-Schmidt and
// selective re-orthogonalization. Stops when the preconditioned residual
// drops below tol * ||M^-1 b||.
GmresResult gmres(const CSR& A, const std::vector<double>& b, const Preconditioner& M, double tol,
                  int max_iter, int restart = 0, const std::vector<double>& x0 = {});

// Dense helper used as an inner Schwarz block solver.
std::vector<double> dense_solve_gmres(const DenseMatrix& A, const std::vector<double>& b, double tol,
                                      int max_iter);

enum class CondMethod { DENSE, POWER };

// 2-norm condition number of M^{-1} A. Dense (exact singular values) up to
// 5000 unknowns; POWER falls back to power/inverse iteration with a reported
// relative error below 5%.
double condition_estimate(const CSR& A, const Preconditioner& M, CondMethod method = CondMethod::DENSE);

}  // namespace nls

#endif

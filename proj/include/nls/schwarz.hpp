#ifndef NLS_SCHWARZ_HPP
#define NLS_SCHWARZ_HPP

#include <memory>
#include <utility>
#include <vector>

#include "nls/assembly.hpp"
#include "nls/dense.hpp"
#include "nls/mesh.hpp"

namespace nls {

// Disjoint index sets assigning every unknown to exactly one subdomain block.
struct BlockPartition {
    std::vector<std::vector<int>> blocks;  // ascending dof ids per block
    std::vector<int> block_of;             // unknown -> block index (0-based)

    int n_blocks() const { return static_cast<int>(blocks.size()); }
};

// Blocks from dof ownership; with neumann=true interaction-layer dofs join the
// block of their boundary part and every dof is an unknown.
BlockPartition partition_dofs(const DofMap& dm, bool neumann = false);

// Single-block partition over n unknowns (degenerate Schwarz = direct solve).
BlockPartition single_block(int n);

enum class SchwarzVariant { MULTIPLICATIVE, ADDITIVE };
enum class InnerSolver { DIRECT, GMRES };

struct SchwarzConfig {
    SchwarzVariant variant = SchwarzVariant::MULTIPLICATIVE;
    double outer_tol = 1e-9;
    double inner_tol = 1e-12;
    int max_outer = 10000;
    InnerSolver inner_solver = InnerSolver::DIRECT;
    double theta = 1.0;  // damping for the additive sweep (1 = undamped)
    bool record_iterates = false;
};

struct IterationTrace {
    std::vector<double> residuals;  // ||A u^k - b||_2, k = 0..iterations
    int iterations = 0;
    bool converged = false;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    std::vector<double> true_residuals;           // unpreconditioned norms (gmres)
    std::vector<std::vector<double>> iterates;    // recorded when requested
};

// Cached dense factorizations of the diagonal blocks A_ii.
class BlockSolver {
public:
    BlockSolver(const CSR& A, const BlockPartition& part);
    void solve(int block, const double* rhs, double* x) const;
    const BlockPartition& partition() const { return part_; }
    DenseMatrix block_matrix(int block) const;

private:
    BlockPartition part_;
    std::vector<DenseLU> lu_;
    std::vector<DenseMatrix> mats_;
};

// Multiplicative (block-Gauss-Seidel) or additive (block-Jacobi) Schwarz
// iteration on the assembled system.
std::pair<std::vector<double>, IterationTrace> schwarz_solve(const SparseSystem& sys,
                                                             const BlockPartition& part,
                                                             const SchwarzConfig& cfg,
                                                             std::vector<double> u0 = {});

}  // namespace nls

#endif

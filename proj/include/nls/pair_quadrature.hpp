#ifndef NLS_PAIR_QUADRATURE_HPP
#define NLS_PAIR_QUADRATURE_HPP

#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "nls/kernel.hpp"
#include "nls/mesh.hpp"
#include "nls/quadrature.hpp"

namespace nls {

// Aggregated pairwise interaction integrals for one element-pair geometry,
// separated by kernel profile and by horizon bucket so any piece table can be
// applied after the fact.
struct PairTables {
    int n_profiles = 0;
    int n_buckets = 0;
    bool self = false;
    // layout: ((orient * n_profiles + profile) * n_buckets + bucket) * 36
    std::vector<double> s;

    const double* block(int orient, int profile, int bucket) const {
        return &s[(static_cast<size_t>(orient) * n_profiles + profile) * n_buckets * 36 +
                  static_cast<size_t>(bucket) * 36];
    }
};

// Evaluates the pairwise interaction integrals
//   (orient 0)  int_{E1} int_{E2} phi_i(x) (phi_j(x) - phi_j(y)) gamma(x,y) dy dx
//   (orient 1)  same with the roles of E1 and E2 exchanged
// for the six element-local basis slots [E1 corners; E2 corners]. Pair
// geometry is translation-invariant on the structured mesh, so rules are
// cached per lattice offset.
class PairIntegrator {
public:
    PairIntegrator(const Mesh& mesh, const KernelSpec& kernel, const QuadratureConfig& cfg);

    // Accumulated two-orientation local matrix; rows 0..2 carry the x-in-e1
    // term, rows 3..5 the x-in-e2 term. Self pairs use rows/cols 0..2 only.
    // Pairs whose bounding circles are farther apart than every active
    // horizon are exactly zero and perform no quadrature.
    void integrate(int e1, int e2, double out[6][6]) const;

    // Force the relative-coordinate (radial-angular) rule; used by tests.
    void integrate_relative(int e1, int e2, double out[6][6]) const;

    bool pair_in_range(int e1, int e2) const;
    // Neighborhood window, in grid cells, that can contain interacting pairs.
    int reach_cells() const;

    const KernelSpec& kernel() const { return kernel_; }

private:
    enum Builder { kRelative = 0, kTensor = 1 };

    const Mesh& mesh_;
    const KernelSpec& kernel_;
    QuadratureConfig cfg_;
    std::vector<double> profile_s_;  // s per profile index; <0 means constant
    int const_profile_ = -1;

    mutable std::unordered_map<uint32_t, std::unique_ptr<PairTables>> cache_;
    mutable std::shared_mutex cache_mtx_;

    int profile_index(const KernelPiece& pc) const;
    int class_of_pair(const KernelPiece& a, const KernelPiece& b) const;
    const PairTables& tables(int di, int dj, int sa, int sb, int cls, Builder builder) const;
    PairTables build_tables(int di, int dj, int sa, int sb, int cls, Builder builder) const;
    PairTables build_relative(const Triangle& ta, const Triangle& tb, bool self, int cls) const;
    PairTables build_tensor(const Triangle& ta, const Triangle& tb) const;
    void evaluate(const PairTables& t, const KernelPiece& pa, const KernelPiece& pb,
                  bool swapped, double out[6][6]) const;
    void integrate_routed(int e1, int e2, bool force_relative, double out[6][6]) const;
};

}  // namespace nls

#endif

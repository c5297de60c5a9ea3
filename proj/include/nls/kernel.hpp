#ifndef NLS_KERNEL_HPP
#define NLS_KERNEL_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nls/errors.hpp"
#include "nls/geometry.hpp"

namespace nls {

// Region ids: 0 is the interaction layer, 1..n are subdomains.
constexpr int kRegionLayer = 0;

enum class Profile { CONSTANT, FRACTIONAL };

// One radial piece gamma(x,y) = coef * chi_{|x-y|<=delta}          (CONSTANT)
//                             = coef * |x-y|^-(2+2s) * chi_{...}   (FRACTIONAL)
struct KernelPiece {
    Profile profile = Profile::CONSTANT;
    double coef = 0.0;
    double s = 0.0;      // fractional order, in (0,1) for FRACTIONAL pieces
    double delta = 0.0;  // horizon of this piece
    bool set = false;

    bool operator==(const KernelPiece& o) const {
        return profile == o.profile && coef == o.coef && s == o.s && delta == o.delta;
    }
};

// c_delta = (2-2s) / (pi * delta^(2-2s)); normalizes the fractional kernel's
// second moment to 1.
double scaling_constant(double s, double delta);

// Interaction kernel as a table of radial pieces over ordered region pairs.
class KernelSpec {
public:
    KernelSpec(int n_subdomains, double delta);

    void set_piece(int region_x, int region_y, KernelPiece piece);
    void set_all(KernelPiece piece);
    const KernelPiece& piece(int region_x, int region_y) const;

    int n_subdomains() const { return n_; }
    double delta() const { return delta_; }
    double max_delta() const { return max_delta_; }
    double min_active_delta() const { return min_active_delta_; }
    bool symmetric() const { return symmetric_; }
    bool all_constant() const { return all_constant_; }

    // Distinct horizons, ascending (radial cap breakpoints for assembly).
    const std::vector<double>& deltas() const { return deltas_; }
    // Distinct fractional orders, ascending (radial substitution classes).
    const std::vector<double>& fractional_orders() const { return s_values_; }

    // Must be called after the last set_piece.
    void finalize();

    double eval(Vec2 x, Vec2 y, int region_x, int region_y) const {
        const KernelPiece& pc = piece(region_x, region_y);
        double r2 = norm2(x - y);
        if (r2 > pc.delta * pc.delta) return 0.0;
        if (pc.profile == Profile::CONSTANT) return pc.coef;
        return pc.coef * std::pow(r2, -(1.0 + pc.s));
    }

    // Exact second moment of a piece: integral of z1^2 * gamma(|z|) over the
    // horizon ball (closed-form polar integration).
    static double second_moment(const KernelPiece& pc);

    // Example kernels used throughout the experiments ------------------------

    // Three-subdomain singular kernel: 4c/7c/5c/10c case split by region pair.
    static KernelSpec dirichlet_three_region(double s, double delta);
    // One constant kernel everywhere, zero on layer x layer pairs.
    static KernelSpec neumann_constant(double delta);
    // Constant kernel driven by region(x)=1, fractional by region(x)=2.
    static KernelSpec patch_coupled(double s2, double delta1, double delta2);

private:
    int n_;
    double delta_;
    double max_delta_ = 0.0;
    double min_active_delta_ = 0.0;
    bool symmetric_ = false;
    bool all_constant_ = true;
    bool finalized_ = false;
    std::vector<KernelPiece> table_;  // (n_+1) x (n_+1)
    std::vector<double> deltas_;
    std::vector<double> s_values_;
};

}  // namespace nls

#endif

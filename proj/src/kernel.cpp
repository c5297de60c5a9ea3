#include "nls/kernel.hpp"

#include <algorithm>

namespace nls {

double scaling_constant(double s, double delta) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("scaling_constant: s must lie in (0,1)");
    if (!(delta > 0.0)) throw std::invalid_argument("scaling_constant: delta must be positive");
    return (2.0 - 2.0 * s) / (M_PI * std::pow(delta, 2.0 - 2.0 * s));
}

KernelSpec::KernelSpec(int n_subdomains, double delta) : n_(n_subdomains), delta_(delta) {
    if (n_ < 1) throw std::invalid_argument("KernelSpec: need at least one subdomain");
    if (!(delta_ > 0.0)) throw std::invalid_argument("KernelSpec: delta must be positive");
    table_.resize((n_ + 1) * (n_ + 1));
}

void KernelSpec::set_piece(int rx, int ry, KernelPiece pc) {
    if (rx < 0 || rx > n_ || ry < 0 || ry > n_) throw std::invalid_argument("KernelSpec: region out of range");
    if (pc.coef < 0.0) throw std::invalid_argument("KernelSpec: kernel coefficients must be nonnegative");
    if (pc.profile == Profile::FRACTIONAL && !(pc.s > 0.0 && pc.s < 1.0))
        throw std::invalid_argument("KernelSpec: fractional order must lie in (0,1)");
    if (pc.delta <= 0.0) pc.delta = delta_;
    pc.set = true;
    table_[rx * (n_ + 1) + ry] = pc;
    finalized_ = false;
}

void KernelSpec::set_all(KernelPiece pc) {
    for (int rx = 0; rx <= n_; ++rx)
        for (int ry = 0; ry <= n_; ++ry) set_piece(rx, ry, pc);
}

const KernelPiece& KernelSpec::piece(int rx, int ry) const {
    if (rx < 0 || rx > n_ || ry < 0 || ry > n_) throw std::invalid_argument("KernelSpec: region out of range");
    const KernelPiece& pc = table_[rx * (n_ + 1) + ry];
    if (!pc.set) throw ConfigError("KernelSpec: no piece configured for region pair");
    return pc;
}

void KernelSpec::finalize() {
    max_delta_ = 0.0;
    min_active_delta_ = 1e300;
    all_constant_ = true;
    deltas_.clear();
    s_values_.clear();
    for (const auto& pc : table_) {
        if (!pc.set) continue;
        if (pc.coef > 0.0) {
            max_delta_ = std::max(max_delta_, pc.delta);
            min_active_delta_ = std::min(min_active_delta_, pc.delta);
            deltas_.push_back(pc.delta);
            if (pc.profile == Profile::FRACTIONAL) {
                all_constant_ = false;
                s_values_.push_back(pc.s);
            }
        }
    }
    std::sort(deltas_.begin(), deltas_.end());
    deltas_.erase(std::unique(deltas_.begin(), deltas_.end()), deltas_.end());
    std::sort(s_values_.begin(), s_values_.end());
    s_values_.erase(std::unique(s_values_.begin(), s_values_.end()), s_values_.end());

    symmetric_ = true;
    for (int rx = 0; rx <= n_ && symmetric_; ++rx)
        for (int ry = 0; ry <= n_; ++ry) {
            const auto& a = table_[rx * (n_ + 1) + ry];
            const auto& b = table_[ry * (n_ + 1) + rx];
            if (a.set != b.set || (a.set && !(a == b))) {
                symmetric_ = false;
                break;
            }
        }
    finalized_ = true;
}

double KernelSpec::second_moment(const KernelPiece& pc) {
    double d = pc.delta;
    if (pc.profile == Profile::CONSTANT) return pc.coef * M_PI * d * d * d * d / 4.0;
    return pc.coef * M_PI * std::pow(d, 2.0 - 2.0 * pc.s) / (2.0 - 2.0 * pc.s);
}

KernelSpec KernelSpec::dirichlet_three_region(double s, double delta) {
    double c = scaling_constant(s, delta);
    KernelSpec k(3, delta);
    auto frac = [&](double mult) {
        KernelPiece pc;
        pc.profile = Profile::FRACTIONAL;
        pc.coef = mult * c;
        pc.s = s;
        pc.delta = delta;
        return pc;
    };
    // default: cross-subdomain pairs
    k.set_all(frac(10.0));
    k.set_piece(1, 1, frac(4.0));
    k.set_piece(2, 2, frac(4.0));
    k.set_piece(3, 3, frac(7.0));
    for (int i = 0; i <= 3; ++i) {
        k.set_piece(i, kRegionLayer, frac(5.0));
        k.set_piece(kRegionLayer, i, frac(5.0));
    }
    k.finalize();
    return k;
}

KernelSpec KernelSpec::neumann_constant(double delta) {
    KernelSpec k(2, delta);
    KernelPiece pc;
    pc.profile = Profile::CONSTANT;
    pc.coef = 4.0 / (M_PI * delta * delta * delta * delta);
    pc.delta = delta;
    k.set_all(pc);
    KernelPiece zero;
    zero.profile = Profile::CONSTANT;
    zero.coef = 0.0;
    zero.delta = delta;
    k.set_piece(kRegionLayer, kRegionLayer, zero);
    k.finalize();
    return k;
}

KernelSpec KernelSpec::patch_coupled(double s2, double delta1, double delta2) {
    KernelSpec k(2, std::max(delta1, delta2));
    KernelPiece c1;
    c1.profile = Profile::CONSTANT;
    c1.coef = 4.0 / (M_PI * delta1 * delta1 * delta1 * delta1);
    c1.delta = delta1;
    KernelPiece c2;
    c2.profile = Profile::FRACTIONAL;
    c2.coef = scaling_constant(s2, delta2);
    c2.s = s2;
    c2.delta = delta2;
    KernelPiece zero;
    zero.profile = Profile::CONSTANT;
    zero.coef = 0.0;
    zero.delta = std::max(delta1, delta2);
    for (int ry = 0; ry <= 2; ++ry) {
        k.set_piece(1, ry, c1);
        k.set_piece(2, ry, c2);
        k.set_piece(kRegionLayer, ry, zero);
    }
    k.finalize();
    return k;
}

}  // namespace nls

#include "nls/pair_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>

namespace nls {

namespace {

constexpr double kSectorTol = 1e-10;  // relative acceptance for angular bisection
constexpr int kMaxSectorDepth = 7;

// Accumulator with the PairTables layout.
struct Agg {
    int P = 0, G = 0;
    std::vector<double> s;

    Agg() = default;
    Agg(int p, int g) : P(p), G(g), s(static_cast<size_t>(2) * p * g * 36, 0.0) {}

    double* block(int o, int p, int g) {
        return &s[(static_cast<size_t>(o) * P + p) * G * 36 + static_cast<size_t>(g) * 36];
    }
    void add(const Agg& o) {
        for (size_t i = 0; i < s.size(); ++i) s[i] += o.s[i];
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : s) m = std::max(m, std::abs(v));
        return m;
    }
    double max_diff(const Agg& o) const {
        double m = 0.0;
        for (size_t i = 0; i < s.size(); ++i) m = std::max(m, std::abs(s[i] - o.s[i]));
        return m;
    }
};

Triangle shape_triangle(int shape, int ci, int cj, double h) {
    Vec2 a{ci * h, cj * h}, b{(ci + 1) * h, cj * h};
    Vec2 c{(ci + 1) * h, (cj + 1) * h}, d{ci * h, (cj + 1) * h};
    if (shape == 0) return Triangle{{a, b, d}};
    return Triangle{{b, c, d}};
}

double wrap_pm_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

PairIntegrator::PairIntegrator(const Mesh& mesh, const KernelSpec& kernel, const QuadratureConfig& cfg)
    : mesh_(mesh), kernel_(kernel), cfg_(cfg) {
    cfg_.validate();
    if (kernel_.deltas().empty()) throw ConfigError("PairIntegrator: kernel has no active pieces");
    // profile registry: constants first, then each distinct fractional order
    profile_s_.clear();
    const_profile_ = 0;
    profile_s_.push_back(-1.0);
    for (double s : kernel_.fractional_orders()) profile_s_.push_back(s);
}

int PairIntegrator::profile_index(const KernelPiece& pc) const {
    if (pc.profile == Profile::CONSTANT) return const_profile_;
    for (size_t i = 1; i < profile_s_.size(); ++i)
        if (profile_s_[i] == pc.s) return static_cast<int>(i);
    throw ConfigError("PairIntegrator: unregistered fractional order");
}

int PairIntegrator::class_of_pair(const KernelPiece& a, const KernelPiece& b) const {
    double smax = -1.0;
    if (a.coef > 0.0 && a.profile == Profile::FRACTIONAL) smax = std::max(smax, a.s);
    if (b.coef > 0.0 && b.profile == Profile::FRACTIONAL) smax = std::max(smax, b.s);
    if (smax < 0.0) return 0;
    const auto& sv = kernel_.fractional_orders();
    for (size_t i = 0; i < sv.size(); ++i)
        if (sv[i] == smax) return static_cast<int>(i) + 1;
    return 0;
}

int PairIntegrator::reach_cells() const {
    double rad = 0.745356 * mesh_.h;  // bounding radius of one element
    return static_cast<int>(std::ceil((kernel_.max_delta() + 2.0 * rad) / mesh_.h)) + 1;
}

bool PairIntegrator::pair_in_range(int e1, int e2) const {
    Triangle ta = mesh_.triangle(e1), tb = mesh_.triangle(e2);
    double d = norm(ta.centroid() - tb.centroid());
    return d - ta.bounding_radius() - tb.bounding_radius() <= kernel_.max_delta();
}

void PairIntegrator::integrate(int e1, int e2, double out[6][6]) const {
    integrate_routed(e1, e2, false, out);
}

void PairIntegrator::integrate_relative(int e1, int e2, double out[6][6]) const {
    integrate_routed(e1, e2, true, out);
}

void PairIntegrator::integrate_routed(int e1, int e2, bool force_relative, double out[6][6]) const {
    std::memset(out, 0, 36 * sizeof(double));
    int a = std::min(e1, e2), b = std::max(e1, e2);
    int ra = mesh_.element_region[a], rb = mesh_.element_region[b];
    const KernelPiece& pa = kernel_.piece(ra, rb);
    const KernelPiece& pb = kernel_.piece(rb, ra);
    if (pa.coef <= 0.0 && pb.coef <= 0.0) return;

    Triangle ta = mesh_.triangle(a), tb = mesh_.triangle(b);
    double d = norm(ta.centroid() - tb.centroid());
    double rs = ta.bounding_radius() + tb.bounding_radius();
    double deff = 0.0, dmin = 1e300;
    bool all_const = true;
    for (const KernelPiece* pc : {&pa, &pb})
        if (pc->coef > 0.0) {
            deff = std::max(deff, pc->delta);
            dmin = std::min(dmin, pc->delta);
            if (pc->profile != Profile::CONSTANT) all_const = false;
        }
    if (d - rs > deff) return;  // compact support: exactly zero

    bool touching = (a == b);
    if (!touching) {
        for (int i = 0; i < 3 && !touching; ++i)
            for (int j = 0; j < 3; ++j)
                if (mesh_.triangles[a][i] == mesh_.triangles[b][j]) {
                    touching = true;
                    break;
                }
    }

    Builder builder;
    int cls;
    if (force_relative) {
        builder = kRelative;
        cls = touching ? class_of_pair(pa, pb) : 0;
    } else if (cfg_.ball_handling == BallHandling::CAPPED) {
        if (all_const && d + rs <= dmin) {
            builder = kTensor;
            cls = 0;
        } else {
            builder = kRelative;
            cls = touching ? class_of_pair(pa, pb) : 0;
        }
    } else {
        builder = touching ? kRelative : kTensor;
        cls = touching ? class_of_pair(pa, pb) : 0;
    }

    int di = mesh_.cell_ix(b) - mesh_.cell_ix(a);
    int dj = mesh_.cell_iy(b) - mesh_.cell_iy(a);
    const PairTables& t = tables(di, dj, mesh_.shape_of(a), mesh_.shape_of(b), cls, builder);
    evaluate(t, pa, pb, e1 != a, out);
}

const PairTables& PairIntegrator::tables(int di, int dj, int sa, int sb, int cls, Builder builder) const {
    uint32_t key = static_cast<uint32_t>(di + 64) | (static_cast<uint32_t>(dj + 64) << 8) |
                   (static_cast<uint32_t>(sa) << 16) | (static_cast<uint32_t>(sb) << 17) |
                   (static_cast<uint32_t>(cls) << 18) | (static_cast<uint32_t>(builder) << 24);
    {
        std::shared_lock lock(cache_mtx_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto built = std::make_unique<PairTables>(build_tables(di, dj, sa, sb, cls, builder));
    std::unique_lock lock(cache_mtx_);
    auto [it, inserted] = cache_.try_emplace(key, std::move(built));
    return *it->second;
}

PairTables PairIntegrator::build_tables(int di, int dj, int sa, int sb, int cls, Builder builder) const {
    Triangle ta = shape_triangle(sa, 0, 0, mesh_.h);
    Triangle tb = shape_triangle(sb, di, dj, mesh_.h);
    bool self = (di == 0 && dj == 0 && sa == sb);
    if (builder == kTensor) return build_tensor(ta, tb);
    return build_relative(ta, tb, self, cls);
}

namespace {

// One z-node: accumulate the inner x-polygon integral exactly (degree-2 rule
// on a fan triangulation; the integrand is quadratic in x for fixed z).
void accumulate_node(const Triangle& ta, const Triangle& tb, bool self, Vec2 z, double wz, double r,
                     int bucket, const std::vector<double>& profile_s, Agg& agg) {
    Polygon p = intersect_shifted(ta, tb, -z);
    if (p.n < 3) return;
    const TriRule& rule = triangle_rule(3);
    double n1[36], n2[36];
    std::memset(n1, 0, sizeof n1);
    std::memset(n2, 0, sizeof n2);
    for (int k = 1; k + 1 < p.n; ++k) {
        Vec2 e1 = p.p[k] - p.p[0], e2 = p.p[k + 1] - p.p[0];
        double jac = cross(e1, e2);  // 2 * sub-triangle area
        if (std::abs(jac) < 1e-300) continue;
        for (size_t m = 0; m < rule.p.size(); ++m) {
            Vec2 x = p.p[0] + rule.p[m].x * e1 + rule.p[m].y * e2;
            Vec2 y = x + z;
            double w = rule.w[m] * jac;  // reference weights sum to 1/2, jac is twice the area
            auto bx = barycentric(ta, x);
            if (self) {
                auto by = barycentric(ta, y);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) n1[i * 6 + j] += w * bx[i] * (bx[j] - by[j]);
            } else {
                auto by = barycentric(tb, y);
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        n1[i * 6 + j] += w * bx[i] * bx[j];
                        n1[i * 6 + 3 + j] -= w * bx[i] * by[j];
                        n2[(3 + i) * 6 + 3 + j] += w * by[i] * by[j];
                        n2[(3 + i) * 6 + j] -= w * by[i] * bx[j];
                    }
                }
            }
        }
    }
    int np = static_cast<int>(profile_s.size());
    for (int pidx = 0; pidx < np; ++pidx) {
        double rho = profile_s[pidx] < 0.0 ? 1.0 : std::pow(r, -2.0 - 2.0 * profile_s[pidx]);
        double fac = wz * rho;
        double* b1 = agg.block(0, pidx, bucket);
        for (int q = 0; q < 36; ++q) b1[q] += fac * n1[q];
        if (!self) {
            double* b2 = agg.block(1, pidx, bucket);
            for (int q = 0; q < 36; ++q) b2[q] += fac * n2[q];
        }
    }
}

}  // namespace

PairTables PairIntegrator::build_relative(const Triangle& ta, const Triangle& tb, bool self, int cls) const {
    const auto& deltas = kernel_.deltas();
    int G = static_cast<int>(deltas.size());
    int P = static_cast<int>(profile_s_.size());
    double rmax = deltas.back();
    bool capped = cfg_.ball_handling == BallHandling::CAPPED;
    double subs_kappa = cls > 0 ? 1.0 / (2.0 - 2.0 * profile_s_[cls]) : 1.0;
    int nq = cfg_.singular_rule * cfg_.refine;
    const Gauss1D& gl = gauss_legendre(nq);

    Polygon H = minkowski_difference(ta, tb);

    // sector boundaries: polygon vertex angles plus horizon-circle crossings
    std::vector<double> angles;
    for (int i = 0; i < H.n; ++i) angles.push_back(std::atan2(H.p[i].y, H.p[i].x));
    for (double dlt : deltas) {
        if (dlt > rmax) continue;
        for (int i = 0; i < H.n; ++i) {
            Vec2 p = H.p[i], q = H.p[(i + 1) % H.n];
            Vec2 e = q - p;
            double aa = norm2(e), bb = 2.0 * dot(p, e), cc = norm2(p) - dlt * dlt;
            double disc = bb * bb - 4.0 * aa * cc;
            if (disc <= 0.0 || aa < 1e-300) continue;
            for (double sgn : {-1.0, 1.0}) {
                double t = (-bb + sgn * std::sqrt(disc)) / (2.0 * aa);
                if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
                Vec2 pt = p + t * e;
                angles.push_back(std::atan2(pt.y, pt.x));
            }
        }
    }

    std::vector<double> bounds;
    if (self) {
        std::sort(angles.begin(), angles.end());
        for (double a : angles)
            if (bounds.empty() || a - bounds.back() > 1e-12) bounds.push_back(a);
        if (!bounds.empty()) bounds.push_back(bounds.front() + 2.0 * M_PI);
    } else {
        Vec2 cen{0.0, 0.0};
        for (int i = 0; i < H.n; ++i) cen = cen + (1.0 / H.n) * H.p[i];
        double tc = std::atan2(cen.y, cen.x);
        for (double& a : angles) a = tc + wrap_pm_pi(a - tc);
        std::sort(angles.begin(), angles.end());
        for (double a : angles)
            if (bounds.empty() || a - bounds.back() > 1e-12) bounds.push_back(a);
    }

    Agg total(P, G);
    if (bounds.size() < 2) {
        PairTables t;
        t.n_profiles = P;
        t.n_buckets = G;
        t.self = self;
        t.s = std::move(total.s);
        return t;
    }

    auto bucket_of = [&](double r) {
        for (int g = 0; g < G; ++g)
            if (r <= deltas[g] * (1.0 + 1e-12)) return g;
        return -1;
    };

    // Radii at which the clip combinatorics of Ta and (Tb - r omega) change;
    // the inner integral is piecewise polynomial in r between them.
    auto clip_events = [&](Vec2 om, double rlo, double rhi, std::vector<double>& rseg) {
        auto push = [&](double r) {
            if (r > rlo * (1.0 + 1e-12) + 1e-300 && r < rhi * (1.0 - 1e-12)) rseg.push_back(r);
        };
        for (int a = 0; a < 3; ++a)
            for (int j = 0; j < 3; ++j) {
                Vec2 e = tb.v[(j + 1) % 3] - tb.v[j];
                double denom = cross(om, e);
                if (std::abs(denom) > 1e-300) push(cross(tb.v[j] - ta.v[a], e) / denom);
                Vec2 ep = ta.v[(j + 1) % 3] - ta.v[j];
                double denom2 = cross(om, ep);
                if (std::abs(denom2) > 1e-300) push(cross(tb.v[a] - ta.v[j], ep) / denom2);
            }
    };

    auto eval_sector = [&](double a0, double a1) {
        Agg agg(P, G);
        for (int qi = 0; qi < nq; ++qi) {
            double th = a0 + (a1 - a0) * gl.x[qi];
            double wth = (a1 - a0) * gl.w[qi];
            Vec2 om{std::cos(th), std::sin(th)};
            double rlo, rhi;
            if (ray_polygon(H, om, rlo, rhi) == 0) continue;
            rhi = std::min(rhi, rmax);
            if (rhi <= rlo * (1.0 + 1e-14) + 1e-300) continue;
            // radial segments: horizons (capped mode) plus clip events
            std::vector<double> rseg{rlo};
            if (capped)
                for (double dlt : deltas)
                    if (dlt > rlo * (1.0 + 1e-12) && dlt < rhi * (1.0 - 1e-12)) rseg.push_back(dlt);
            clip_events(om, rlo, rhi, rseg);
            rseg.push_back(rhi);
            std::sort(rseg.begin(), rseg.end());
            rseg.erase(std::unique(rseg.begin(), rseg.end(),
                                   [&](double a, double b) { return b - a < 1e-13 * rhi; }),
                       rseg.end());
            if (rseg.back() < rhi * (1.0 - 1e-13)) rseg.push_back(rhi);
            for (size_t si = 0; si + 1 < rseg.size(); ++si) {
                double ra = rseg[si], rb = rseg[si + 1];
                bool substitute = (cls > 0 && ra <= 1e-14 * rb);
                for (int ri = 0; ri < nq; ++ri) {
                    double r, wr;
                    if (substitute) {
                        double t = gl.x[ri];
                        r = rb * std::pow(t, subs_kappa);
                        wr = rb * subs_kappa * std::pow(t, subs_kappa - 1.0) * gl.w[ri];
                    } else {
                        r = ra + (rb - ra) * gl.x[ri];
                        wr = (rb - ra) * gl.w[ri];
                    }
                    if (r <= 0.0) continue;
                    int g = bucket_of(r);
                    if (g < 0) continue;
                    accumulate_node(ta, tb, self, r * om, wth * wr * r, r, g, profile_s_, agg);
                }
            }
        }
        return agg;
    };

    // adaptive bisection per sector, deterministic
    struct Stack {
        double a, b;
        int depth;
    };
    for (size_t k = 0; k + 1 < bounds.size(); ++k) {
        std::vector<Stack> stack{{bounds[k], bounds[k + 1], 0}};
        while (!stack.empty()) {
            Stack s = stack.back();
            stack.pop_back();
            if (s.b - s.a < 1e-13) continue;
            Agg coarse = eval_sector(s.a, s.b);
            double mid = 0.5 * (s.a + s.b);
            Agg fine = eval_sector(s.a, mid);
            fine.add(eval_sector(mid, s.b));
            double scale = std::max(fine.max_abs(), total.max_abs());
            if (s.depth >= kMaxSectorDepth || coarse.max_diff(fine) <= kSectorTol * (scale + 1e-300)) {
                total.add(fine);
            } else {
                stack.push_back({mid, s.b, s.depth + 1});
                stack.push_back({s.a, mid, s.depth + 1});
            }
        }
    }

    PairTables t;
    t.n_profiles = P;
    t.n_buckets = G;
    t.self = self;
    t.s = std::move(total.s);
    return t;
}

PairTables PairIntegrator::build_tensor(const Triangle& ta, const Triangle& tb) const {
    const auto& deltas = kernel_.deltas();
    int G = static_cast<int>(deltas.size());
    int P = static_cast<int>(profile_s_.size());
    bool self = false;
    for (int i = 0; i < 3; ++i) self = self || norm2(ta.v[i] - tb.v[i]) < 1e-300;
    self = norm2(ta.v[0] - tb.v[0]) < 1e-300 && norm2(ta.v[1] - tb.v[1]) < 1e-300 &&
           norm2(ta.v[2] - tb.v[2]) < 1e-300;

    Agg agg(P, G);
    const TriRule& ro = triangle_rule(cfg_.outer_rule);
    const TriRule& ri = triangle_rule(cfg_.inner_rule);
    double ja = 2.0 * ta.area(), jb = 2.0 * tb.area();
    Vec2 ea1 = ta.v[1] - ta.v[0], ea2 = ta.v[2] - ta.v[0];
    Vec2 eb1 = tb.v[1] - tb.v[0], eb2 = tb.v[2] - tb.v[0];

    auto bucket_of = [&](double r) {
        for (int g = 0; g < G; ++g)
            if (r <= deltas[g] * (1.0 + 1e-12)) return g;
        return -1;
    };

    for (size_t q = 0; q < ro.p.size(); ++q) {
        Vec2 x = ta.v[0] + ro.p[q].x * ea1 + ro.p[q].y * ea2;
        double bxa[3] = {1.0 - ro.p[q].x - ro.p[q].y, ro.p[q].x, ro.p[q].y};
        for (size_t r = 0; r < ri.p.size(); ++r) {
            Vec2 y = tb.v[0] + ri.p[r].x * eb1 + ri.p[r].y * eb2;
            double byb[3] = {1.0 - ri.p[r].x - ri.p[r].y, ri.p[r].x, ri.p[r].y};
            double w = ro.w[q] * ja * ri.w[r] * jb;
            double dist = norm(x - y);
            int g = bucket_of(dist);
            if (g < 0) continue;
            double n1[36], n2[36];
            std::memset(n1, 0, sizeof n1);
            std::memset(n2, 0, sizeof n2);
            if (self) {
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) n1[i * 6 + j] += w * bxa[i] * (bxa[j] - byb[j]);
            } else {
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        n1[i * 6 + j] += w * bxa[i] * bxa[j];
                        n1[i * 6 + 3 + j] -= w * bxa[i] * byb[j];
                        n2[(3 + i) * 6 + 3 + j] += w * byb[i] * byb[j];
                        n2[(3 + i) * 6 + j] -= w * byb[i] * bxa[j];
                    }
            }
            for (int pidx = 0; pidx < P; ++pidx) {
                double rho = profile_s_[pidx] < 0.0 ? 1.0 : std::pow(dist, -2.0 - 2.0 * profile_s_[pidx]);
                double* b1 = agg.block(0, pidx, g);
                for (int t = 0; t < 36; ++t) b1[t] += rho * n1[t];
                if (!self) {
                    double* b2 = agg.block(1, pidx, g);
                    for (int t = 0; t < 36; ++t) b2[t] += rho * n2[t];
                }
            }
        }
    }

    PairTables t;
    t.n_profiles = P;
    t.n_buckets = G;
    t.self = self;
    t.s = std::move(agg.s);
    return t;
}

void PairIntegrator::evaluate(const PairTables& t, const KernelPiece& pa, const KernelPiece& pb,
                              bool swapped, double out[6][6]) const {
    const auto& deltas = kernel_.deltas();
    double canon[36];
    std::memset(canon, 0, sizeof canon);
    if (pa.coef > 0.0) {
        int prof = profile_index(pa);
        for (int g = 0; g < t.n_buckets; ++g) {
            if (deltas[g] > pa.delta * (1.0 + 1e-12)) break;
            const double* b = t.block(0, prof, g);
            for (int q = 0; q < 36; ++q) canon[q] += pa.coef * b[q];
        }
    }
    if (!t.self && pb.coef > 0.0) {
        int prof = profile_index(pb);
        for (int g = 0; g < t.n_buckets; ++g) {
            if (deltas[g] > pb.delta * (1.0 + 1e-12)) break;
            const double* b = t.block(1, prof, g);
            for (int q = 0; q < 36; ++q) canon[q] += pb.coef * b[q];
        }
    }
    if (!swapped) {
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) out[i][j] += canon[i * 6 + j];
    } else {
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) out[(i + 3) % 6][(j + 3) % 6] += canon[i * 6 + j];
    }
}

}  // namespace nls

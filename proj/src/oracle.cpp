#include "nls/oracle.hpp"

#include <cmath>

#include "nls/quadrature.hpp"

namespace nls {
namespace oracle {

DenseSystem DenseSystem::from_sparse(const SparseSystem& sys) {
    if (sys.n_unknowns > kMaxDofs) throw std::invalid_argument("oracle: system exceeds dense cap");
    DenseSystem d;
    d.n = sys.n_unknowns;
    d.A = sys.A.to_dense();
    d.b = sys.b;
    return d;
}

namespace {

struct LocalTri {
    Triangle t;
    int elem;  // owning mesh element
};

// quadrature points of a subdivided triangle rule
void subdivide(const Triangle& t, int levels, std::vector<Triangle>& out) {
    if (levels == 0) {
        out.push_back(t);
        return;
    }
    Vec2 m01 = 0.5 * (t.v[0] + t.v[1]), m12 = 0.5 * (t.v[1] + t.v[2]), m20 = 0.5 * (t.v[2] + t.v[0]);
    subdivide({{t.v[0], m01, m20}}, levels - 1, out);
    subdivide({{m01, t.v[1], m12}}, levels - 1, out);
    subdivide({{m20, m12, t.v[2]}}, levels - 1, out);
    subdivide({{m01, m12, m20}}, levels - 1, out);
}

// Pairwise symmetric-form integral over two (sub)triangles with graded
// bisection toward touching configurations. Accumulates the 3x3x4 products of
// the parent elements' barycentric hats.
struct PairAccum {
    // [corner of ea][corner of eb] blocks: xx, xy, yx, yy moments
    double xx[9] = {0}, xy[9] = {0}, yx[9] = {0}, yy[9] = {0};
};

void pair_integral(const Triangle& pa, const Triangle& pb, const Triangle& ta, const Triangle& tb,
                   const KernelSpec& kernel, int ra, int rb, const TriRule& rule, int depth,
                   PairAccum& acc) {
    Vec2 ca = ta.centroid(), cb = tb.centroid();
    double radius = ta.bounding_radius() + tb.bounding_radius();
    double d = norm(ca - cb);
    bool near = d < radius * 1.5;
    if (near && depth > 0) {
        // split the larger triangle
        const Triangle& big = ta.area() >= tb.area() ? ta : tb;
        bool split_a = &big == &ta;
        std::vector<Triangle> kids;
        subdivide(big, 1, kids);
        for (const auto& kid : kids) {
            if (split_a)
                pair_integral(pa, pb, kid, tb, kernel, ra, rb, rule, depth - 1, acc);
            else
                pair_integral(pa, pb, ta, kid, kernel, ra, rb, rule, depth - 1, acc);
        }
        return;
    }
    double ja = 2.0 * ta.area(), jb = 2.0 * tb.area();
    Vec2 a1 = ta.v[1] - ta.v[0], a2 = ta.v[2] - ta.v[0];
    Vec2 b1 = tb.v[1] - tb.v[0], b2 = tb.v[2] - tb.v[0];
    for (size_t q = 0; q < rule.p.size(); ++q) {
        Vec2 x = ta.v[0] + rule.p[q].x * a1 + rule.p[q].y * a2;
        auto lx = barycentric(pa, x);
        for (size_t r = 0; r < rule.p.size(); ++r) {
            Vec2 y = tb.v[0] + rule.p[r].x * b1 + rule.p[r].y * b2;
            double r2 = norm2(x - y);
            if (r2 < 1e-30) continue;  // exclude coincident points
            double gv = kernel.eval(x, y, ra, rb);
            if (gv == 0.0) continue;
            double w = rule.w[q] * ja * rule.w[r] * jb * gv;
            auto ly = barycentric(pb, y);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    acc.xx[i * 3 + j] += w * lx[i] * lx[j];
                    acc.xy[i * 3 + j] += w * lx[i] * ly[j];
                    acc.yx[i * 3 + j] += w * ly[i] * lx[j];
                    acc.yy[i * 3 + j] += w * ly[i] * ly[j];
                }
        }
    }
}

}  // namespace

DenseAssembly dense_assemble(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel, int refine) {
    if (dm.n_dofs() > kMaxDofs) throw std::invalid_argument("oracle: dof count exceeds dense cap");
    if (!kernel.symmetric())
        throw std::invalid_argument("oracle: dense_assemble supports symmetric kernels only");
    int nu = dm.interior_count, nb = dm.n_dofs() - nu;
    DenseAssembly out;
    out.A = DenseMatrix(nu, nu);
    out.A_I = DenseMatrix(nu, nb);

    // base rule refined by subdividing each element refine/2 levels (refine=4
    // quadruples the per-direction resolution relative to production)
    int levels = refine >= 4 ? 2 : (refine >= 2 ? 1 : 0);
    const TriRule& rule = triangle_rule(7);
    int depth = 9;  // graded bisection budget near the diagonal

    int ne = mesh.n_elements();
    auto scatter = [&](int i_dof, int j_dof, double v) {
        if (i_dof >= nu) return;
        if (j_dof < nu)
            out.A(i_dof, j_dof) += v;
        else
            out.A_I(i_dof, j_dof - nu) += v;
    };

    for (int ea = 0; ea < ne; ++ea) {
        int ra = mesh.element_region[ea];
        Triangle ta = mesh.triangle(ea);
        std::vector<Triangle> subs_a;
        subdivide(ta, levels, subs_a);
        for (int eb = 0; eb < ne; ++eb) {  // every pair, no pruning
            int rb = mesh.element_region[eb];
            if (ra == 0 && rb == 0) continue;  // both test functions vanish
            Triangle tb = mesh.triangle(eb);
            std::vector<Triangle> subs_b;
            subdivide(tb, levels, subs_b);
            PairAccum acc;
            for (const auto& sa : subs_a)
                for (const auto& sb : subs_b)
                    pair_integral(ta, tb, sa, sb, kernel, ra, rb, rule, depth, acc);
            // symmetric form: 1/2 (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) gamma
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    int di = dm.elem_dof[ea][i], dj = dm.elem_dof[ea][j];
                    int ei = dm.elem_dof[eb][i], ej = dm.elem_dof[eb][j];
                    scatter(di, dj, 0.5 * acc.xx[i * 3 + j]);
                    scatter(di, ej, -0.5 * acc.xy[i * 3 + j]);
                    scatter(ei, dj, -0.5 * acc.yx[i * 3 + j]);
                    scatter(ei, ej, 0.5 * acc.yy[i * 3 + j]);
                }
        }
    }
    return out;
}

std::vector<std::vector<double>> dense_block_iterate(const DenseSystem& sys, const BlockPartition& part,
                                                     SchwarzVariant variant, int k,
                                                     std::vector<double> u0) {
    int n = sys.n;
    std::vector<double> u = u0.empty() ? std::vector<double>(n, 0.0) : std::move(u0);
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("dense_block_iterate: bad initial guess size");

    int nb = part.n_blocks();
    std::vector<DenseLU> lus;
    for (int b = 0; b < nb; ++b) {
        const auto& idx = part.blocks[b];
        int m = static_cast<int>(idx.size());
        DenseMatrix blk(m, m);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) blk(p, q) = sys.A(idx[p], idx[q]);
        lus.emplace_back(std::move(blk));
    }

    std::vector<std::vector<double>> iterates{u};
    std::vector<double> u_old;
    for (int it = 0; it < k; ++it) {
        u_old = u;
        const std::vector<double>& read = (variant == SchwarzVariant::ADDITIVE) ? u_old : u;
        for (int b = 0; b < nb; ++b) {
            const auto& idx = part.blocks[b];
            int m = static_cast<int>(idx.size());
            std::vector<double> rhs(m), x(m);
            for (int p = 0; p < m; ++p) {
                int row = idx[p];
                double s = sys.b[row];
                for (int c = 0; c < n; ++c)
                    if (part.block_of[c] != b) s -= sys.A(row, c) * read[c];
                rhs[p] = s;
            }
            lus[b].solve(rhs.data(), x.data());
            for (int p = 0; p < m; ++p) u[idx[p]] = x[p];
        }
        iterates.push_back(u);
    }
    return iterates;
}

std::vector<double> dense_solve(const DenseSystem& sys) {
    DenseLU lu(sys.A);
    return lu.solve(sys.b);
}

}  // namespace oracle
}  // namespace nls

#include "nls/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace nls {

namespace {

struct RowBuffer {
    std::vector<int> cols;    // sorted candidate columns
    std::vector<double> val;  // matching accumulators

    void reset(std::vector<int>&& candidates) {
        cols = std::move(candidates);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        val.assign(cols.size(), 0.0);
    }
    void add(int c, double v) {
        auto it = std::lower_bound(cols.begin(), cols.end(), c);
        val[static_cast<size_t>(it - cols.begin())] += v;
    }
};

// Elements within the interaction window around element e, ascending.
void neighbor_elements(const Mesh& mesh, int e, int window, std::vector<int>& out) {
    out.clear();
    int ci = mesh.cell_ix(e), cj = mesh.cell_iy(e);
    int i0 = std::max(0, ci - window), i1 = std::min(mesh.cells_x - 1, ci + window);
    int j0 = std::max(0, cj - window), j1 = std::min(mesh.cells_y - 1, cj + window);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
            int cell = j * mesh.cells_x + i;
            out.push_back(2 * cell);
            out.push_back(2 * cell + 1);
        }
}

// (element, corner) pairs through which a dof's basis function is active.
std::vector<std::pair<int, int>> dof_supports(const Mesh& mesh, const DofMap& dm, int dof) {
    std::vector<std::pair<int, int>> out;
    int v = dm.dofs[dof].vertex;
    for (int e : mesh.vertex_elements[v])
        for (int c = 0; c < 3; ++c)
            if (mesh.triangles[e][c] == v && dm.elem_dof[e][c] == dof) out.push_back({e, c});
    return out;
}

// Element split into per-subdomain polygons along the layout's coefficient
// boundaries, so piecewise data integrates exactly even when the splitter
// lines cut through elements.
struct RegionPiece {
    int region;
    Polygon poly;
};

std::vector<RegionPiece> region_pieces(const DomainLayout& lay, const Triangle& t) {
    std::vector<Polygon> polys(1);
    polys[0].push(t.v[0]);
    polys[0].push(t.v[1]);
    polys[0].push(t.v[2]);

    std::vector<std::pair<Vec2, Vec2>> lines;  // (point, direction)
    double xm = 0.5 * (lay.x0 + lay.x1), ym = 0.5 * (lay.y0 + lay.y1);
    if (lay.splitter == Splitter::TWO_REGION) {
        lines.push_back({{xm, 0.0}, {0.0, 1.0}});
    } else if (lay.splitter == Splitter::THREE_REGION) {
        lines.push_back({{xm, 0.0}, {0.0, 1.0}});
        lines.push_back({{0.0, ym}, {1.0, 0.0}});
    } else if (lay.splitter == Splitter::VERTICAL_STRIPS) {
        for (double a : lay.strip_abscissae) lines.push_back({{a, 0.0}, {0.0, 1.0}});
    }
    for (auto& [p, d] : lines) {
        std::vector<Polygon> next;
        for (auto& poly : polys) {
            Polygon left = clip_halfplane(poly, p, p + d);
            Polygon right = clip_halfplane(poly, p + d, p);
            double scale = std::abs(poly.area());
            if (std::abs(left.area()) > 1e-12 * scale) next.push_back(left);
            if (std::abs(right.area()) > 1e-12 * scale) next.push_back(right);
        }
        polys = std::move(next);
    }
    std::vector<RegionPiece> out;
    for (auto& poly : polys) {
        Vec2 c{0.0, 0.0};
        for (int i = 0; i < poly.n; ++i) c = c + (1.0 / poly.n) * poly.p[i];
        out.push_back({lay.region_of(c), poly});
    }
    return out;
}

// integral over one polygon piece of data(x) * lambda_corner(x)
template <class F>
double integrate_piece(const Triangle& parent, const Polygon& poly, int corner, const F& data) {
    const TriRule& rule = triangle_rule(7);
    double s = 0.0;
    for (int k = 1; k + 1 < poly.n; ++k) {
        Vec2 e1 = poly.p[k] - poly.p[0], e2 = poly.p[k + 1] - poly.p[0];
        double jac = cross(e1, e2);  // reference weights sum to 1/2, jac is twice the area
        for (size_t q = 0; q < rule.p.size(); ++q) {
            Vec2 x = poly.p[0] + rule.p[q].x * e1 + rule.p[q].y * e2;
            double lam = barycentric(parent, x)[corner];
            s += rule.w[q] * jac * lam * data(x);
        }
    }
    return s;
}

struct AssemblyKind {
    bool neumann = false;
    bool reduced = false;
    const std::vector<double>* kappa = nullptr;
    const std::vector<double>* neumann_data = nullptr;
};

SparseSystem assemble_common(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel,
                             const QuadratureConfig& quad, const Forcing& forcing,
                             const std::function<double(Vec2)>& boundary_data, const AssemblyKind& kind) {
    if (static_cast<int>(forcing.per_region.size()) < mesh.n_regions + 1)
        throw std::invalid_argument("assemble: forcing must cover every subdomain");
    PairIntegrator integ(mesh, kernel, quad);
    int window = integ.reach_cells();

    SparseSystem sys;
    int n_dofs = dm.n_dofs();
    sys.n_unknowns = kind.neumann ? dm.neumann_count : dm.interior_count;
    sys.n_dirichlet = n_dofs - sys.n_unknowns;
    int nu = sys.n_unknowns;

    std::vector<std::vector<int>> row_cols_a(nu), row_cols_ai(nu);
    std::vector<std::vector<double>> row_val_a(nu), row_val_ai(nu);
    sys.f.assign(nu, 0.0);

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        RowBuffer buf;
        std::vector<int> nbr;
        std::vector<int> cand;
        double loc[6][6];
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 8)
#endif
        for (int i = 0; i < nu; ++i) {
            auto supports = dof_supports(mesh, dm, i);
            // candidate columns
            cand.clear();
            for (auto& [e, c] : supports) {
                (void)c;
                neighbor_elements(mesh, e, window, nbr);
                for (int e2 : nbr)
                    for (int cc = 0; cc < 3; ++cc) cand.push_back(dm.elem_dof[e2][cc]);
                for (int cc = 0; cc < 3; ++cc) cand.push_back(dm.elem_dof[e][cc]);
            }
            buf.reset(std::move(cand));
            cand = {};

            double fi = 0.0;
            for (auto& [e, c] : supports) {
                int reg_e = mesh.element_region[e];
                Triangle tri = mesh.triangle(e);
                // load vector and, for the Neumann problem, mass + flux terms;
                // piecewise data is resolved exactly across splitter lines
                if (reg_e > 0) {
                    for (const auto& rp : region_pieces(mesh.layout, tri)) {
                        fi += integrate_piece(tri, rp.poly, c,
                                              [&](Vec2 x) { return forcing.eval(x, rp.region); });
                        if (kind.neumann) {
                            double kap = kind.kappa->at(rp.region);
                            for (int c2 = 0; c2 < 3; ++c2)
                                buf.add(dm.elem_dof[e][c2],
                                        integrate_piece(tri, rp.poly, c, [&](Vec2 x) {
                                            return kap * barycentric(tri, x)[c2];
                                        }));
                        }
                    }
                } else if (kind.neumann) {
                    int part = mesh.layout.boundary_part_of(tri.centroid());
                    double gn = part < static_cast<int>(kind.neumann_data->size())
                                    ? (*kind.neumann_data)[part]
                                    : 0.0;
                    fi += gn * tri.area() / 3.0;
                }

                neighbor_elements(mesh, e, window, nbr);
                for (int e2 : nbr) {
                    if (!kind.neumann && mesh.element_region[e] == 0) continue;
                    if (kind.neumann && kind.reduced && reg_e == 0 && mesh.element_region[e2] == 0)
                        continue;
                    if (!integ.pair_in_range(e, e2)) continue;
                    integ.integrate(e, e2, loc);
                    for (int j6 = 0; j6 < 6; ++j6) {
                        double v = loc[c][j6];
                        if (v == 0.0) continue;
                        int cj = j6 < 3 ? dm.elem_dof[e][j6] : dm.elem_dof[e2][j6 - 3];
                        buf.add(cj, v);
                    }
                }
            }
            sys.f[i] = fi;

            for (size_t k = 0; k < buf.cols.size(); ++k) {
                double v = buf.val[k];
                if (std::abs(v) < 1e-300) v = 0.0;
                int cj = buf.cols[k];
                if (cj < nu) {
                    row_cols_a[i].push_back(cj);
                    row_val_a[i].push_back(v);
                } else {
                    row_cols_ai[i].push_back(cj - nu);
                    row_val_ai[i].push_back(v);
                }
            }
        }
    }

    auto pack = [](int n, int m, std::vector<std::vector<int>>& cols,
                   std::vector<std::vector<double>>& vals) {
        CSR a;
        a.n = n;
        a.m = m;
        a.rowptr.assign(n + 1, 0);
        for (int i = 0; i < n; ++i) a.rowptr[i + 1] = a.rowptr[i] + static_cast<int>(cols[i].size());
        a.col.reserve(a.rowptr[n]);
        a.val.reserve(a.rowptr[n]);
        for (int i = 0; i < n; ++i) {
            a.col.insert(a.col.end(), cols[i].begin(), cols[i].end());
            a.val.insert(a.val.end(), vals[i].begin(), vals[i].end());
        }
        return a;
    };
    sys.A = pack(nu, nu, row_cols_a, row_val_a);
    sys.A_I = pack(nu, sys.n_dirichlet, row_cols_ai, row_val_ai);

    sys.g.assign(sys.n_dirichlet, 0.0);
    if (!kind.neumann && boundary_data)
        for (int j = 0; j < sys.n_dirichlet; ++j)
            sys.g[j] = boundary_data(mesh.vertices[dm.dofs[nu + j].vertex]);
    sys.b = sys.f;
    if (sys.n_dirichlet > 0) {
        auto lift = sys.A_I.matvec(sys.g);
        for (int i = 0; i < nu; ++i) sys.b[i] -= lift[i];
    }
    return sys;
}

}  // namespace

SparseSystem assemble_dirichlet(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel,
                                const QuadratureConfig& quad, const Forcing& forcing,
                                const std::function<double(Vec2)>& boundary_data) {
    AssemblyKind kind;
    return assemble_common(mesh, dm, kernel, quad, forcing, boundary_data, kind);
}

SparseSystem assemble_neumann(const Mesh& mesh, const DofMap& dm, const KernelSpec& kernel,
                              const QuadratureConfig& quad, const std::vector<double>& kappa,
                              const Forcing& forcing, const std::vector<double>& neumann_data,
                              bool reduced) {
    if (static_cast<int>(kappa.size()) < mesh.n_regions + 1)
        throw std::invalid_argument("assemble_neumann: kappa must cover every subdomain");
    for (int r = 1; r <= mesh.n_regions; ++r)
        if (!(kappa[r] > 0.0))
            throw std::invalid_argument("assemble_neumann: kappa must be strictly positive");
    AssemblyKind kind;
    kind.neumann = true;
    kind.reduced = reduced;
    kind.kappa = &kappa;
    kind.neumann_data = &neumann_data;
    return assemble_common(mesh, dm, kernel, quad, Forcing{forcing}, nullptr, kind);
}

}  // namespace nls

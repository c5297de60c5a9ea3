#include "nls/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nls {

int DomainLayout::n_regions() const {
    switch (splitter) {
        case Splitter::SINGLE: return 1;
        case Splitter::TWO_REGION: return 2;
        case Splitter::THREE_REGION: return 3;
        case Splitter::VERTICAL_STRIPS: return static_cast<int>(strip_abscissae.size()) + 1;
    }
    return 1;
}

int DomainLayout::region_of(Vec2 p) const {
    double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    switch (splitter) {
        case Splitter::SINGLE:
            return 1;
        case Splitter::TWO_REGION:
            return p.x < xm ? 1 : 2;
        case Splitter::THREE_REGION:
            if (p.x < xm) return 1;
            return p.y >= ym ? 2 : 3;
        case Splitter::VERTICAL_STRIPS: {
            int r = 1;
            for (double a : strip_abscissae)
                if (p.x >= a) ++r;
            return r;
        }
    }
    return 1;
}

int DomainLayout::boundary_part_of(Vec2 p) const {
    if (boundary_split == BoundarySplit::NONE) return 0;
    return p.x < 0.5 * (x0 + x1) ? 1 : 2;
}

Mesh build_mesh(const DomainLayout& layout, double h, double delta) {
    if (!(h > 0.0)) throw std::invalid_argument("build_mesh: h must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("build_mesh: delta must be positive");

    double w = layout.x1 - layout.x0, ht = layout.y1 - layout.y0;
    int nx = static_cast<int>(std::lround(w / h));
    int ny = static_cast<int>(std::lround(ht / h));
    if (nx < 1 || ny < 1 || std::abs(nx * h - w) > 1e-9 * h || std::abs(ny * h - ht) > 1e-9 * h)
        throw AlignmentError("build_mesh: domain side lengths must be multiples of h");
    if (layout.splitter == Splitter::VERTICAL_STRIPS) {
        for (double a : layout.strip_abscissae) {
            double k = (a - layout.x0) / h;
            if (std::abs(k - std::lround(k)) > 1e-9)
                throw AlignmentError("build_mesh: strip abscissa does not align with the grid");
            if (a <= layout.x0 || a >= layout.x1)
                throw std::invalid_argument("build_mesh: strip abscissa outside the domain");
        }
    }

    int lc = static_cast<int>(std::ceil(delta / h - 1e-12));
    Mesh m;
    m.h = h;
    m.delta = delta;
    m.layer_width = lc * h;
    m.layout = layout;
    m.n_regions = layout.n_regions();
    m.layer_cells = lc;
    m.cells_x = nx + 2 * lc;
    m.cells_y = ny + 2 * lc;
    m.origin = {layout.x0 - lc * h, layout.y0 - lc * h};

    int vx = m.cells_x + 1, vy = m.cells_y + 1;
    m.vertices.resize(static_cast<size_t>(vx) * vy);
    for (int j = 0; j < vy; ++j)
        for (int i = 0; i < vx; ++i)
            m.vertices[static_cast<size_t>(j) * vx + i] = {m.origin.x + i * h, m.origin.y + j * h};

    m.triangles.reserve(static_cast<size_t>(m.cells_x) * m.cells_y * 2);
    m.element_region.reserve(m.triangles.capacity());
    auto classify = [&](Vec2 bc) {
        bool inside = bc.x > layout.x0 && bc.x < layout.x1 && bc.y > layout.y0 && bc.y < layout.y1;
        return inside ? layout.region_of(bc) : 0;
    };
    for (int cj = 0; cj < m.cells_y; ++cj)
        for (int ci = 0; ci < m.cells_x; ++ci) {
            int a = cj * vx + ci, b = cj * vx + ci + 1;
            int c = (cj + 1) * vx + ci + 1, d = (cj + 1) * vx + ci;
            // lower (a,b,d) and upper (b,c,d), cut along the b-d diagonal
            m.triangles.push_back({a, b, d});
            m.triangles.push_back({b, c, d});
            for (int s = 0; s < 2; ++s) {
                int e = static_cast<int>(m.triangles.size()) - 2 + s;
                Triangle t = m.triangle(e);
                m.element_region.push_back(classify(t.centroid()));
            }
        }

    // vertex adjacency and labels
    m.vertex_elements.assign(m.vertices.size(), {});
    for (int e = 0; e < m.n_elements(); ++e)
        for (int v : m.triangles[e]) m.vertex_elements[v].push_back(e);

    m.vertex_region.assign(m.vertices.size(), 0);
    m.vertex_touches_layer.assign(m.vertices.size(), 0);
    for (int v = 0; v < m.n_vertices(); ++v) {
        int first = 0;
        bool multi = false, layer = false;
        for (int e : m.vertex_elements[v]) {
            int r = m.element_region[e];
            if (r == 0) {
                layer = true;
            } else if (first == 0) {
                first = r;
            } else if (r != first) {
                multi = true;
            }
        }
        m.vertex_touches_layer[v] = layer ? 1 : 0;
        m.vertex_region[v] = multi ? kVertexInterface : first;
    }
    return m;
}

void Mesh::export_text(std::ostream& os) const {
    os << "vertices " << n_vertices() << "\n";
    for (int v = 0; v < n_vertices(); ++v)
        os << vertices[v].x << " " << vertices[v].y << " " << vertex_region[v] << "\n";
    os << "triangles " << n_elements() << "\n";
    for (int e = 0; e < n_elements(); ++e)
        os << triangles[e][0] << " " << triangles[e][1] << " " << triangles[e][2] << " "
           << element_region[e] << "\n";
}

DofMap build_dof_map(const Mesh& mesh, bool split) {
    DofMap dm;
    dm.n_blocks = mesh.n_regions;
    dm.vertex_to_dofs.assign(mesh.vertices.size(), {});

    struct Raw {
        int vertex, owner, part;
        bool dirichlet, active;
    };
    std::vector<Raw> raw;
    std::vector<std::vector<std::pair<int, int>>> vertex_raw(mesh.vertices.size());  // (owner, raw id)

    // A hat interacts with the domain iff its support reaches the open
    // delta-neighborhood of the rectangle.
    auto support_reaches = [&](int v) {
        double best = 1e300;
        for (int e : mesh.vertex_elements[v])
            best = std::min(best, dist_triangle_rect(mesh.triangle(e), mesh.layout.x0, mesh.layout.y0,
                                                     mesh.layout.x1, mesh.layout.y1));
        return best < mesh.delta * (1.0 - 1e-12);
    };

    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const auto& elems = mesh.vertex_elements[v];
        if (elems.empty()) throw MeshConsistencyError("build_dof_map: vertex with no adjacent elements");
        std::vector<int> regions;
        bool layer = mesh.vertex_touches_layer[v];
        for (int e : elems) {
            int r = mesh.element_region[e];
            if (r > 0 && std::find(regions.begin(), regions.end(), r) == regions.end())
                regions.push_back(r);
        }
        std::sort(regions.begin(), regions.end());
        Vec2 p = mesh.vertices[v];
        int part = mesh.layout.boundary_part_of(p);
        if (regions.empty()) {
            // pure interaction-layer vertex
            vertex_raw[v].push_back({0, static_cast<int>(raw.size())});
            raw.push_back({v, 0, part, true, support_reaches(v)});
        } else if (regions.size() == 1 || !split) {
            int owner = (regions.size() == 1) ? regions[0] : 0;
            vertex_raw[v].push_back({owner, static_cast<int>(raw.size())});
            raw.push_back({v, owner, part, layer, true});
        } else {
            for (int r : regions) {
                vertex_raw[v].push_back({r, static_cast<int>(raw.size())});
                raw.push_back({v, r, part, layer, true});
            }
        }
    }

    // Order: non-Dirichlet dofs sorted by (owner, vertex), then active
    // Dirichlet dofs, then inert ones; both constrained-problem blocks and the
    // Neumann unknown range come out contiguous.
    std::vector<int> order(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Raw &ra = raw[a], &rb = raw[b];
        if (ra.dirichlet != rb.dirichlet) return !ra.dirichlet;
        if (ra.active != rb.active) return ra.active;
        if (!ra.dirichlet && ra.owner != rb.owner) return ra.owner < rb.owner;
        if (ra.vertex != rb.vertex) return ra.vertex < rb.vertex;
        return ra.owner < rb.owner;
    });
    std::vector<int> new_id(raw.size());
    dm.dofs.resize(raw.size());
    dm.interior_count = 0;
    dm.neumann_count = 0;
    for (size_t k = 0; k < order.size(); ++k) {
        const Raw& r = raw[order[k]];
        new_id[order[k]] = static_cast<int>(k);
        dm.dofs[k] = Dof{r.vertex, r.owner, r.part, r.dirichlet, r.active};
        if (!r.dirichlet) ++dm.interior_count;
        if (r.active) ++dm.neumann_count;
    }
    for (int v = 0; v < mesh.n_vertices(); ++v)
        for (auto& pr : vertex_raw[v]) dm.vertex_to_dofs[v].push_back(new_id[pr.second]);

    // Element corner -> dof resolution. Split vertices route each adjacent
    // element's hat piece to the side owning that element; layer elements go
    // to the side the splitter rule assigns their centroid to.
    dm.elem_dof.resize(mesh.triangles.size());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        int re = mesh.element_region[e];
        for (int c = 0; c < 3; ++c) {
            int v = mesh.triangles[e][c];
            const auto& cands = vertex_raw[v];
            int chosen = -1;
            if (cands.size() == 1) {
                chosen = cands[0].second;
            } else {
                int want = re > 0 ? re : mesh.layout.region_of(mesh.triangle(e).centroid());
                for (auto& pr : cands)
                    if (pr.first == want) chosen = pr.second;
                if (chosen < 0) chosen = cands[0].second;
            }
            dm.elem_dof[e][c] = new_id[chosen];
        }
    }
    return dm;
}

}  // namespace nls

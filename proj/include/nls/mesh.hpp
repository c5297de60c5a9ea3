#ifndef NLS_MESH_HPP
#define NLS_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nls/errors.hpp"
#include "nls/geometry.hpp"

namespace nls {

constexpr int kVertexInterface = -1;  // vertex_region value for split vertices

enum class Splitter { SINGLE, TWO_REGION, THREE_REGION, VERTICAL_STRIPS };
enum class BoundarySplit { NONE, VERTICAL };

// Rectangular domain plus the rule assigning points to subdomains and,
// optionally, interaction-layer points to Neumann boundary parts.
struct DomainLayout {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    Splitter splitter = Splitter::SINGLE;
    std::vector<double> strip_abscissae;  // for VERTICAL_STRIPS
    BoundarySplit boundary_split = BoundarySplit::NONE;

    int n_regions() const;
    // Subdomain id (1..n) of a point; the rule extends beyond the rectangle.
    int region_of(Vec2 p) const;
    // Neumann boundary-part id (1..n) of a layer point, 0 when unsplit.
    int boundary_part_of(Vec2 p) const;

    static DomainLayout unit_square(Splitter s, BoundarySplit b = BoundarySplit::NONE) {
        DomainLayout l;
        l.splitter = s;
        l.boundary_split = b;
        return l;
    }
};

struct Mesh {
    double h = 0.0;
    double delta = 0.0;        // requested interaction radius
    double layer_width = 0.0;  // meshed layer, delta rounded up to whole cells
    DomainLayout layout;
    int n_regions = 1;

    // structured grid metadata: cells_x * cells_y squares, two triangles each
    int cells_x = 0, cells_y = 0, layer_cells = 0;
    Vec2 origin;  // lower-left grid corner

    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> element_region;            // 0 = interaction layer, 1..n
    std::vector<int> vertex_region;             // 0 layer, -1 interface, 1..n
    std::vector<uint8_t> vertex_touches_layer;  // adjacent to a layer element
    std::vector<std::vector<int>> vertex_elements;

    int n_elements() const { return static_cast<int>(triangles.size()); }
    int n_vertices() const { return static_cast<int>(vertices.size()); }

    Triangle triangle(int e) const {
        const auto& t = triangles[e];
        return Triangle{{vertices[t[0]], vertices[t[1]], vertices[t[2]]}};
    }
    // 0 for the lower triangle of a grid square, 1 for the upper
    int shape_of(int e) const { return e & 1; }
    int cell_of(int e) const { return e >> 1; }
    int cell_ix(int e) const { return cell_of(e) % cells_x; }
    int cell_iy(int e) const { return cell_of(e) / cells_x; }

    void export_text(std::ostream& os) const;
};

// Structured square grid over the rectangle padded by ceil(delta/h)*h on all
// sides, each square cut along the same diagonal.
Mesh build_mesh(const DomainLayout& layout, double h, double delta);

struct Dof {
    int vertex = -1;
    int owner = 0;  // subdomain owning the basis support; 0 for pure-layer dofs
    int part = 0;   // Neumann boundary part for layer dofs, 0 if unsplit
    bool dirichlet = false;  // lies in the closed interaction layer
    // basis support reaches the delta-neighborhood of the domain; always true
    // except for dofs in the over-meshed layer corners, which interact with
    // nothing and stay out of every unknown set
    bool active = true;
};

struct DofMap {
    // non-Dirichlet first (sorted by owner), then active Dirichlet, then inert
    std::vector<Dof> dofs;
    std::vector<std::vector<int>> vertex_to_dofs;
    std::vector<std::array<int, 3>> elem_dof;  // per element corner -> dof id
    int interior_count = 0;
    int neumann_count = 0;  // interior + active layer dofs
    int n_blocks = 0;

    int n_dofs() const { return static_cast<int>(dofs.size()); }
    int boundary_count() const { return n_dofs() - interior_count; }
    // Subdomain block a dof belongs to when all dofs are unknowns (Neumann).
    int block_of_dof(int d) const {
        const Dof& df = dofs[d];
        return df.owner > 0 ? df.owner : df.part;
    }
};

// One dof per vertex except on subdomain interfaces, where the hat function is
// split into per-subdomain halves (one dof per adjacent subdomain). With
// split=false interface hats are kept whole and left unowned.
DofMap build_dof_map(const Mesh& mesh, bool split = true);

}  // namespace nls

#endif

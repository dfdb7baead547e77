#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pointctl {

/// Coordinates are always stored with three components; 2D meshes keep z = 0.
using Point = std::array<double, 3>;

/// Vertex indices of a simplex. Only the first dim + 1 entries are used.
using Cell = std::array<int, 4>;

/// Barycentric coordinates; only the first dim + 1 entries are used.
using Barycentric = std::array<double, 4>;

/// Maps a coordinate to the closest point on the curved boundary.
using BoundaryProjector = std::function<Point(const Point&)>;

struct PointLocation {
  int cell_index = -1;
  Barycentric barycentric{};
};

/// Conforming simplicial mesh of a polygonal/polyhedral domain.
///
/// Boundary vertices are derived from the topology: a vertex is on the
/// boundary iff it belongs to a facet that is shared by exactly one cell.
/// Meshes produced by refinement remember the parent of every cell.
class Mesh {
 public:
  Mesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells,
       BoundaryProjector projector = {}, std::vector<int> parents = {});

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }

  const Point& vertex(int v) const { return vertices_[v]; }
  const std::vector<Point>& vertices() const { return vertices_; }
  std::span<const int> cell(int c) const {
    return {cells_[c].data(), static_cast<std::size_t>(dim_ + 1)};
  }
  const std::vector<Cell>& cells() const { return cells_; }

  bool is_boundary_vertex(int v) const { return boundary_flags_[v] != 0; }
  std::size_t num_boundary_vertices() const;
  const BoundaryProjector& boundary_projector() const { return projector_; }

  /// Parent cell (index into the coarser mesh) of every cell; empty for a
  /// mesh that was not produced by refinement.
  std::span<const int> parents() const { return parents_; }

  /// Neighbour across the facet opposite local vertex i, or -1 on the boundary.
  int neighbour(int c, int i) const { return neighbours_[c][i]; }
  /// Cells incident to vertex v, in increasing order.
  std::span<const int> cells_of_vertex(int v) const;

  double signed_volume(int c) const;
  double volume(int c) const;
  /// Largest pairwise vertex distance of cell c.
  double diameter(int c) const;
  /// Inradius of cell c.
  double inradius(int c) const;
  Point centroid(int c) const;

  /// Barycentric coordinates of x with respect to cell c (no containment test).
  Barycentric barycentric(int c, const Point& x) const;
  /// Physical point with the given barycentric coordinates in cell c.
  Point map_to_physical(int c, const Barycentric& lambda) const;

  /// Facets (sorted vertex tuples) that belong to exactly one cell.
  std::vector<std::array<int, 3>> boundary_facets() const;

 private:
  void build_topology();

  int dim_;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  BoundaryProjector projector_;
  std::vector<int> parents_;
  std::vector<std::uint8_t> boundary_flags_;
  std::vector<std::array<int, 4>> neighbours_;
  std::vector<int> vertex_cell_offsets_;
  std::vector<int> vertex_cell_list_;
};

/// Structured mesh of (0,1)^2 with n cells per side, every square split along
/// its (0,0)-(1,1) diagonal.
Mesh build_unit_square(int n);

/// Unit disk: a 4x4 square grid on [-1,1]^2 with diagonals pointing away from
/// the origin, mapped radially onto B_1(0), refined `level` times.
Mesh build_unit_disk(int level);

/// Unit ball: a 2x2x2 cube grid on [-1,1]^3, each cube cut into six
/// tetrahedra around its diagonal through the origin, mapped onto B_1(0) and
/// refined `level` times.
Mesh build_unit_ball(int level);

/// Red refinement: triangles into 4, tetrahedra into 8. New vertices on the
/// boundary are moved by the mesh's boundary projector.
Mesh refine_uniform(const Mesh& mesh);

/// Locates x, preferring the lowest cell index when x lies on a shared
/// facet, edge or vertex. Throws PointOutsideMesh.
PointLocation locate_point(const Mesh& mesh, const Point& x, int hint = 0);

/// Maximum cell diameter.
double mesh_size(const Mesh& mesh);

/// Total volume of the mesh.
double mesh_volume(const Mesh& mesh);

/// max over cells of diameter / inradius.
double shape_regularity(const Mesh& mesh);

/// True when every interior facet is shared by exactly two cells and no facet
/// appears in more than two cells.
bool is_conforming(const Mesh& mesh);

}  // namespace pointctl

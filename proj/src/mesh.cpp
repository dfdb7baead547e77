#include "pointctl/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "pointctl/errors.hpp"

namespace pointctl {

namespace {

constexpr double kLocateTolerance = 1e-10;

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point midpoint(const Point& a, const Point& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

// Sorted facet key plus the owning cell and local index of the opposite vertex.
struct FacetRecord {
  std::array<int, 3> key;
  int cell;
  int local;
};

std::vector<FacetRecord> collect_facets(int dim, const std::vector<Cell>& cells) {
  std::vector<FacetRecord> facets;
  facets.reserve(cells.size() * (dim + 1));
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    for (int i = 0; i <= dim; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      int k = 0;
      for (int j = 0; j <= dim; ++j) {
        if (j != i) key[k++] = cells[c][j];
      }
      std::sort(key.begin(), key.begin() + dim);
      facets.push_back({key, c, i});
    }
  }
  std::sort(facets.begin(), facets.end(), [](const FacetRecord& a, const FacetRecord& b) {
    return std::tie(a.key, a.cell, a.local) < std::tie(b.key, b.cell, b.local);
  });
  return facets;
}

double simplex_signed_volume(int dim, const std::array<Point, 4>& x) {
  if (dim == 2) {
    const Point a = sub(x[1], x[0]);
    const Point b = sub(x[2], x[0]);
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }
  const Point a = sub(x[1], x[0]);
  const Point b = sub(x[2], x[0]);
  const Point c = sub(x[3], x[0]);
  return dot(a, cross(b, c)) / 6.0;
}

double simplex_diameter(int dim, const std::array<Point, 4>& x) {
  double h = 0.0;
  for (int i = 0; i <= dim; ++i) {
    for (int j = i + 1; j <= dim; ++j) h = std::max(h, norm(sub(x[i], x[j])));
  }
  return h;
}

double simplex_inradius(int dim, const std::array<Point, 4>& x) {
  const double vol = std::abs(simplex_signed_volume(dim, x));
  if (dim == 2) {
    const double perimeter =
        norm(sub(x[1], x[0])) + norm(sub(x[2], x[1])) + norm(sub(x[0], x[2]));
    return 2.0 * vol / perimeter;
  }
  double area = 0.0;
  for (int i = 0; i < 4; ++i) {
    std::array<Point, 3> f;
    int k = 0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) f[k++] = x[j];
    }
    area += 0.5 * norm(cross(sub(f[1], f[0]), sub(f[2], f[0])));
  }
  return 3.0 * vol / area;
}

std::array<Point, 4> gather(const std::vector<Point>& vertices, const Cell& cell, int dim) {
  std::array<Point, 4> x{};
  for (int i = 0; i <= dim; ++i) x[i] = vertices[cell[i]];
  return x;
}

double quality(int dim, const std::array<Point, 4>& x) {
  return simplex_diameter(dim, x) / simplex_inradius(dim, x);
}

Cell oriented(int dim, const std::vector<Point>& vertices, Cell cell) {
  if (simplex_signed_volume(dim, gather(vertices, cell, dim)) < 0.0) {
    std::swap(cell[dim - 1], cell[dim]);
  }
  return cell;
}

// Radial map of the square/cube [-1,1]^d onto the unit ball: x -> x |x|_inf / |x|_2.
Point square_to_ball(const Point& x) {
  const double r2 = norm(x);
  if (r2 == 0.0) return x;
  const double rinf = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
  const double s = rinf / r2;
  return {x[0] * s, x[1] * s, x[2] * s};
}

Point project_to_sphere(const Point& x) {
  const double r = norm(x);
  return {x[0] / r, x[1] / r, x[2] / r};
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<Cell> cells,
           BoundaryProjector projector, std::vector<int> parents)
    : dim_(dim),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      projector_(std::move(projector)),
      parents_(std::move(parents)) {
  if (dim_ != 2 && dim_ != 3) throw InvalidProblem("mesh dimension must be 2 or 3");
  if (!parents_.empty() && parents_.size() != cells_.size()) {
    throw DimensionMismatch("parent map size does not match the number of cells");
  }
  for (auto& cell : cells_) {
    for (int i = dim_ + 1; i < 4; ++i) cell[i] = -1;
    for (int i = 0; i <= dim_; ++i) {
      if (cell[i] < 0 || cell[i] >= static_cast<int>(vertices_.size())) {
        throw InvalidProblem("cell references a vertex out of range");
      }
    }
  }
  build_topology();
}

void Mesh::build_topology() {
  const auto facets = collect_facets(dim_, cells_);
  boundary_flags_.assign(vertices_.size(), 0);
  neighbours_.assign(cells_.size(), {-1, -1, -1, -1});
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i + 1;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    if (j - i == 1) {
      for (int k = 0; k < dim_; ++k) boundary_flags_[facets[i].key[k]] = 1;
    } else if (j - i == 2) {
      neighbours_[facets[i].cell][facets[i].local] = facets[i + 1].cell;
      neighbours_[facets[i + 1].cell][facets[i + 1].local] = facets[i].cell;
    }
    i = j;
  }

  vertex_cell_offsets_.assign(vertices_.size() + 1, 0);
  for (const auto& cell : cells_) {
    for (int i = 0; i <= dim_; ++i) ++vertex_cell_offsets_[cell[i] + 1];
  }
  std::partial_sum(vertex_cell_offsets_.begin(), vertex_cell_offsets_.end(),
                   vertex_cell_offsets_.begin());
  vertex_cell_list_.resize(vertex_cell_offsets_.back());
  std::vector<int> fill(vertex_cell_offsets_.begin(), vertex_cell_offsets_.end() - 1);
  for (int c = 0; c < static_cast<int>(cells_.size()); ++c) {
    for (int i = 0; i <= dim_; ++i) vertex_cell_list_[fill[cells_[c][i]]++] = c;
  }
}

std::size_t Mesh::num_boundary_vertices() const {
  return static_cast<std::size_t>(std::count(boundary_flags_.begin(), boundary_flags_.end(), 1));
}

std::span<const int> Mesh::cells_of_vertex(int v) const {
  return {vertex_cell_list_.data() + vertex_cell_offsets_[v],
          static_cast<std::size_t>(vertex_cell_offsets_[v + 1] - vertex_cell_offsets_[v])};
}

double Mesh::signed_volume(int c) const {
  return simplex_signed_volume(dim_, gather(vertices_, cells_[c], dim_));
}

double Mesh::volume(int c) const { return std::abs(signed_volume(c)); }

double Mesh::diameter(int c) const {
  return simplex_diameter(dim_, gather(vertices_, cells_[c], dim_));
}

double Mesh::inradius(int c) const {
  return simplex_inradius(dim_, gather(vertices_, cells_[c], dim_));
}

Point Mesh::centroid(int c) const {
  Point x{0.0, 0.0, 0.0};
  for (int i = 0; i <= dim_; ++i) {
    for (int k = 0; k < 3; ++k) x[k] += vertices_[cells_[c][i]][k];
  }
  for (auto& xk : x) xk /= dim_ + 1;
  return x;
}

Barycentric Mesh::barycentric(int c, const Point& x) const {
  const auto v = gather(vertices_, cells_[c], dim_);
  Barycentric lambda{0.0, 0.0, 0.0, 0.0};
  if (dim_ == 2) {
    const double det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                       (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    const double dx = x[0] - v[0][0];
    const double dy = x[1] - v[0][1];
    lambda[1] = (dx * (v[2][1] - v[0][1]) - dy * (v[2][0] - v[0][0])) / det;
    lambda[2] = (dy * (v[1][0] - v[0][0]) - dx * (v[1][1] - v[0][1])) / det;
    lambda[0] = 1.0 - lambda[1] - lambda[2];
    return lambda;
  }
  const Point a = sub(v[1], v[0]);
  const Point b = sub(v[2], v[0]);
  const Point c3 = sub(v[3], v[0]);
  const Point d = sub(x, v[0]);
  const double det = dot(a, cross(b, c3));
  lambda[1] = dot(d, cross(b, c3)) / det;
  lambda[2] = dot(a, cross(d, c3)) / det;
  lambda[3] = dot(a, cross(b, d)) / det;
  lambda[0] = 1.0 - lambda[1] - lambda[2] - lambda[3];
  return lambda;
}

Point Mesh::map_to_physical(int c, const Barycentric& lambda) const {
  Point x{0.0, 0.0, 0.0};
  for (int i = 0; i <= dim_; ++i) {
    const Point& v = vertices_[cells_[c][i]];
    for (int k = 0; k < 3; ++k) x[k] += lambda[i] * v[k];
  }
  return x;
}

std::vector<std::array<int, 3>> Mesh::boundary_facets() const {
  const auto facets = collect_facets(dim_, cells_);
  std::vector<std::array<int, 3>> result;
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i + 1;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    if (j - i == 1) result.push_back(facets[i].key);
    i = j;
  }
  return result;
}

Mesh build_unit_square(int n) {
  if (n < 1) throw InvalidProblem("build_unit_square needs n >= 1");
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0});
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Cell> cells;
  cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  }
  return Mesh(2, std::move(vertices), std::move(cells));
}

Mesh build_unit_disk(int level) {
  if (level < 0) throw InvalidProblem("build_unit_disk needs level >= 0");
  constexpr int n = 4;
  std::vector<Point> vertices;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const Point x{-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, 0.0};
      vertices.push_back(square_to_ball(x));
    }
  }
  auto id = [](int i, int j) { return j * (n + 1) + i; };
  std::vector<Cell> cells;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool same_sign = (i < n / 2) == (j < n / 2);
      if (same_sign) {
        cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
        cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
      } else {
        cells.push_back({id(i, j), id(i + 1, j), id(i, j + 1), -1});
        cells.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), -1});
      }
    }
  }
  for (auto& cell : cells) cell = oriented(2, vertices, cell);
  Mesh mesh(2, std::move(vertices), std::move(cells), project_to_sphere);
  for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

Mesh build_unit_ball(int level) {
  if (level < 0) throw InvalidProblem("build_unit_ball needs level >= 0");
  constexpr int n = 2;
  std::vector<Point> vertices;
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        const Point x{-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, -1.0 + 2.0 * k / n};
        vertices.push_back(square_to_ball(x));
      }
    }
  }
  auto id = [](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  std::vector<Cell> cells;
  // Every cube has the origin as one corner; the Kuhn path runs from the
  // origin to the opposite corner so all cells share the origin.
  static constexpr std::array<std::array<int, 3>, 6> kPermutations{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int ck = 0; ck < n; ++ck) {
    for (int cj = 0; cj < n; ++cj) {
      for (int ci = 0; ci < n; ++ci) {
        const std::array<int, 3> corner{ci, cj, ck};
        std::array<int, 3> origin{};
        std::array<int, 3> step{};
        for (int d = 0; d < 3; ++d) {
          // Cube spans [corner, corner + 1]; the grid centre is index 1.
          origin[d] = 1;
          step[d] = corner[d] == 1 ? 1 : -1;
        }
        for (const auto& perm : kPermutations) {
          std::array<int, 3> p = origin;
          Cell cell{id(p[0], p[1], p[2]), -1, -1, -1};
          for (int s = 0; s < 3; ++s) {
            p[perm[s]] += step[perm[s]];
            cell[s + 1] = id(p[0], p[1], p[2]);
          }
          cells.push_back(oriented(3, vertices, cell));
        }
      }
    }
  }
  Mesh mesh(3, std::move(vertices), std::move(cells), project_to_sphere);
  for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  const int dim = mesh.dim();
  const int nv = static_cast<int>(mesh.num_vertices());
  const int nc = static_cast<int>(mesh.num_cells());

  // Unique edges via sort; edge_of[c][k] indexes the k-th local edge of c.
  static constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  const int edges_per_cell = dim == 2 ? 3 : 6;
  auto local_edge = [dim](int k) -> std::array<int, 2> {
    if (dim == 2) {
      static constexpr std::array<std::array<int, 2>, 3> k2{{{0, 1}, {0, 2}, {1, 2}}};
      return k2[k];
    }
    return kLocalEdges[k];
  };

  struct EdgeRecord {
    std::array<int, 2> key;
    int cell;
    int local;
  };
  std::vector<EdgeRecord> records;
  records.reserve(static_cast<std::size_t>(nc) * edges_per_cell);
  for (int c = 0; c < nc; ++c) {
    const auto cell = mesh.cell(c);
    for (int k = 0; k < edges_per_cell; ++k) {
      const auto e = local_edge(k);
      const int a = cell[e[0]];
      const int b = cell[e[1]];
      records.push_back({{std::min(a, b), std::max(a, b)}, c, k});
    }
  }
  std::sort(records.begin(), records.end(), [](const EdgeRecord& x, const EdgeRecord& y) {
    return std::tie(x.key, x.cell, x.local) < std::tie(y.key, y.cell, y.local);
  });

  std::vector<std::array<int, 6>> edge_of(nc);
  std::vector<std::array<int, 2>> edges;
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    const int id = static_cast<int>(edges.size());
    edges.push_back(records[i].key);
    while (j < records.size() && records[j].key == records[i].key) {
      edge_of[records[j].cell][records[j].local] = id;
      ++j;
    }
    i = j;
  }

  // An edge is on the boundary iff it lies in a boundary facet.
  std::vector<std::uint8_t> boundary_edge(edges.size(), 0);
  {
    std::vector<std::array<int, 2>> bkeys;
    for (const auto& f : mesh.boundary_facets()) {
      for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
          bkeys.push_back({std::min(f[a], f[b]), std::max(f[a], f[b])});
        }
      }
    }
    std::sort(bkeys.begin(), bkeys.end());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      boundary_edge[e] = std::binary_search(bkeys.begin(), bkeys.end(), edges[e]) ? 1 : 0;
    }
  }

  std::vector<Point> vertices = mesh.vertices();
  vertices.reserve(nv + edges.size());
  const auto& projector = mesh.boundary_projector();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    Point m = midpoint(mesh.vertex(edges[e][0]), mesh.vertex(edges[e][1]));
    if (boundary_edge[e] && projector) m = projector(m);
    vertices.push_back(m);
  }

  std::vector<Cell> cells;
  std::vector<int> parents;
  cells.reserve(static_cast<std::size_t>(nc) * (dim == 2 ? 4 : 8));
  parents.reserve(cells.capacity());
  auto emit = [&](const Cell& cell, int parent) {
    cells.push_back(oriented(dim, vertices, cell));
    parents.push_back(parent);
  };

  for (int c = 0; c < nc; ++c) {
    const auto v = mesh.cell(c);
    const auto& e = edge_of[c];
    if (dim == 2) {
      const int m01 = nv + e[0];
      const int m02 = nv + e[1];
      const int m12 = nv + e[2];
      emit({v[0], m01, m02, -1}, c);
      emit({m01, v[1], m12, -1}, c);
      emit({m02, m12, v[2], -1}, c);
      emit({m01, m12, m02, -1}, c);
      continue;
    }
    const int m01 = nv + e[0];
    const int m02 = nv + e[1];
    const int m03 = nv + e[2];
    const int m12 = nv + e[3];
    const int m13 = nv + e[4];
    const int m23 = nv + e[5];
    emit({v[0], m01, m02, m03}, c);
    emit({m01, v[1], m12, m13}, c);
    emit({m02, m12, v[2], m23}, c);
    emit({m03, m13, m23, v[3]}, c);

    // The inner octahedron is cut along one of its three diagonals; take the
    // one giving the best worst-case child quality (shorter diagonal on ties).
    const std::array<std::array<int, 2>, 3> diagonals{{{m01, m23}, {m02, m13}, {m03, m12}}};
    int best = -1;
    double best_quality = std::numeric_limits<double>::infinity();
    double best_length = std::numeric_limits<double>::infinity();
    std::array<Cell, 4> best_children{};
    for (int d = 0; d < 3; ++d) {
      const auto& diag = diagonals[d];
      const auto& p = diagonals[(d + 1) % 3];
      const auto& q = diagonals[(d + 2) % 3];
      const std::array<int, 4> ring{p[0], q[0], p[1], q[1]};
      std::array<Cell, 4> children{};
      double worst = 0.0;
      for (int r = 0; r < 4; ++r) {
        children[r] = {diag[0], diag[1], ring[r], ring[(r + 1) % 4]};
        worst = std::max(worst, quality(3, gather(vertices, children[r], 3)));
      }
      const double length = norm(sub(vertices[diag[0]], vertices[diag[1]]));
      const bool better = worst < best_quality * (1.0 - 1e-12) ||
                          (worst <= best_quality * (1.0 + 1e-12) && length < best_length * (1.0 - 1e-12));
      if (best < 0 || better) {
        best = d;
        best_quality = worst;
        best_length = length;
        best_children = children;
      }
    }
    for (const auto& child : best_children) emit(child, c);
  }

  return Mesh(dim, std::move(vertices), std::move(cells), projector, std::move(parents));
}

PointLocation locate_point(const Mesh& mesh, const Point& x, int hint) {
  const int dim = mesh.dim();
  const int nc = static_cast<int>(mesh.num_cells());
  auto contains = [&](int c, Barycentric& lambda) {
    lambda = mesh.barycentric(c, x);
    for (int i = 0; i <= dim; ++i) {
      if (lambda[i] < -kLocateTolerance) return false;
    }
    return true;
  };

  Barycentric lambda{};
  int found = -1;
  int current = (hint >= 0 && hint < nc) ? hint : 0;
  for (int steps = 0; steps < nc && nc > 0; ++steps) {
    lambda = mesh.barycentric(current, x);
    int worst = 0;
    for (int i = 1; i <= dim; ++i) {
      if (lambda[i] < lambda[worst]) worst = i;
    }
    if (lambda[worst] >= -kLocateTolerance) {
      found = current;
      break;
    }
    const int next = mesh.neighbour(current, worst);
    if (next < 0) break;
    current = next;
  }
  if (found < 0) {
    for (int c = 0; c < nc; ++c) {
      if (contains(c, lambda)) {
        found = c;
        break;
      }
    }
  }
  if (found < 0) {
    throw PointOutsideMesh("point (" + std::to_string(x[0]) + ", " + std::to_string(x[1]) +
                           ", " + std::to_string(x[2]) + ") is outside the mesh");
  }

  // Any other cell containing x shares a vertex with `found`.
  int best = found;
  for (int i = 0; i <= dim; ++i) {
    for (int c : mesh.cells_of_vertex(mesh.cell(found)[i])) {
      if (c >= best) break;
      Barycentric other{};
      if (contains(c, other)) best = c;
    }
  }

  PointLocation location;
  location.cell_index = best;
  location.barycentric = mesh.barycentric(best, x);
  double sum = 0.0;
  for (int i = 0; i <= dim; ++i) {
    location.barycentric[i] = std::max(location.barycentric[i], 0.0);
    sum += location.barycentric[i];
  }
  for (int i = 0; i <= dim; ++i) location.barycentric[i] /= sum;
  return location;
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) h = std::max(h, mesh.diameter(c));
  return h;
}

double mesh_volume(const Mesh& mesh) {
  double v = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) v += mesh.volume(c);
  return v;
}

double shape_regularity(const Mesh& mesh) {
  double q = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    q = std::max(q, mesh.diameter(c) / mesh.inradius(c));
  }
  return q;
}

bool is_conforming(const Mesh& mesh) {
  const int dim = mesh.dim();
  const auto facets = collect_facets(dim, mesh.cells());
  std::vector<std::array<int, 3>> boundary;
  long long num_facets = 0;
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i + 1;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    if (j - i > 2) return false;
    if (j - i == 1) boundary.push_back(facets[i].key);
    ++num_facets;
    i = j;
  }

  // The boundary must be closed: each ridge of a boundary facet is shared by
  // exactly two boundary facets.
  std::vector<std::array<int, 2>> ridges;
  for (const auto& f : boundary) {
    if (dim == 2) {
      ridges.push_back({f[0], -1});
      ridges.push_back({f[1], -1});
    } else {
      ridges.push_back({f[0], f[1]});
      ridges.push_back({f[0], f[2]});
      ridges.push_back({f[1], f[2]});
    }
  }
  std::sort(ridges.begin(), ridges.end());
  for (std::size_t i = 0; i < ridges.size();) {
    std::size_t j = i + 1;
    while (j < ridges.size() && ridges[j] == ridges[i]) ++j;
    if (j - i != 2) return false;
    i = j;
  }

  // Hanging nodes change the Euler characteristic of a simply connected
  // domain away from 1.
  long long euler = static_cast<long long>(mesh.num_vertices()) + (dim == 2 ? 1 : -1) *
                                                                      static_cast<long long>(mesh.num_cells());
  std::vector<std::array<int, 2>> edges;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const auto v = mesh.cell(c);
    for (int a = 0; a <= dim; ++a) {
      for (int b = a + 1; b <= dim; ++b) edges.push_back({std::min(v[a], v[b]), std::max(v[a], v[b])});
    }
  }
  std::sort(edges.begin(), edges.end());
  const long long num_edges =
      std::unique(edges.begin(), edges.end()) - edges.begin();
  if (dim == 2) {
    euler -= num_edges;
  } else {
    euler += num_facets - num_edges;
  }
  return euler == 1;
}

}  // namespace pointctl

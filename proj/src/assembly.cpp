#include "pointctl/assembly.hpp"

#include <cmath>
#include <numbers>

#include "pointctl/errors.hpp"

namespace pointctl {

namespace {

double dot3(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Smallest eigenvalue of a symmetric dim x dim matrix (closed form).
double smallest_eigenvalue(const Matrix3& a, int dim) {
  if (dim == 2) {
    const double tr = a[0][0] + a[1][1];
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return 0.5 * tr - std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  }
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 == 0.0) return std::min({a[0][0], a[1][1], a[2][2]});
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                    (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Matrix3 b{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  }
  const double det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                       b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                       b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

}  // namespace

DofMap::DofMap(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)), vertex_to_dof_(mesh_->num_vertices(), -1) {
  for (int v = 0; v < static_cast<int>(mesh_->num_vertices()); ++v) {
    if (!mesh_->is_boundary_vertex(v)) {
      vertex_to_dof_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  }
}

FeFunction::FeFunction(std::shared_ptr<const DofMap> map)
    : dofs(std::move(map)), coefficients(dofs->size(), 0.0) {}

FeFunction::FeFunction(std::shared_ptr<const DofMap> map, Vector values)
    : dofs(std::move(map)), coefficients(std::move(values)) {
  if (static_cast<int>(coefficients.size()) != dofs->size()) {
    throw DimensionMismatch("FeFunction: coefficient vector length differs from the DoF count");
  }
}

double FeFunction::value_in_cell(int cell, const Barycentric& lambda) const {
  const auto vertices = dofs->mesh().cell(cell);
  double value = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int d = dofs->dof(vertices[i]);
    if (d >= 0) value += lambda[i] * coefficients[d];
  }
  return value;
}

Vector FeFunction::vertex_values() const {
  Vector values(dofs->mesh().num_vertices(), 0.0);
  const auto interior = dofs->interior_vertices();
  for (std::size_t d = 0; d < interior.size(); ++d) values[interior[d]] = coefficients[d];
  return values;
}

double check_ellipticity(const Mesh& mesh, const CoefficientField& coeffs, const QuadratureRule& rule) {
  double alpha = 1.0;
  if (coeffs.is_laplacian()) return alpha;
  alpha = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    for (const auto& lambda : rule.points) {
      const Point x = mesh.map_to_physical(c, lambda);
      if (coeffs.diffusion) {
        const Matrix3 a = coeffs.diffusion(x);
        alpha = std::min(alpha, smallest_eigenvalue(a, mesh.dim()));
      } else {
        alpha = std::min(alpha, 1.0);
      }
      if (coeffs.reaction && coeffs.reaction(x) < 0.0) {
        throw InvalidProblem("reaction coefficient must be nonnegative");
      }
    }
  }
  if (!(alpha > 0.0)) throw InvalidProblem("diffusion tensor is not uniformly elliptic");
  return alpha;
}

std::array<Point, 4> barycentric_gradients(const Mesh& mesh, int cell) {
  const auto map = reference_map(mesh, cell);
  const auto& J = map.jacobian;
  const int dim = mesh.dim();
  // Rows of J^{-1} are the gradients of lambda_1..lambda_dim.
  std::array<Point, 4> grads{};
  if (dim == 2) {
    const double det = map.jacobian_det;
    grads[1] = {J[1][1] / det, -J[0][1] / det, 0.0};
    grads[2] = {-J[1][0] / det, J[0][0] / det, 0.0};
  } else {
    const double det = map.jacobian_det;
    Matrix3 inv{};
    inv[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) / det;
    inv[0][1] = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) / det;
    inv[0][2] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) / det;
    inv[1][0] = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) / det;
    inv[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) / det;
    inv[1][2] = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) / det;
    inv[2][0] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) / det;
    inv[2][1] = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) / det;
    inv[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) / det;
    for (int i = 0; i < 3; ++i) grads[i + 1] = inv[i];
  }
  for (int k = 0; k < 3; ++k) {
    grads[0][k] = 0.0;
    for (int i = 1; i <= dim; ++i) grads[0][k] -= grads[i][k];
  }
  return grads;
}

SparseMatrix assemble_stiffness(const DofMap& dofs, const CoefficientField& coeffs,
                                const QuadratureRule* rule) {
  const Mesh& mesh = dofs.mesh();
  const int dim = mesh.dim();
  const int nloc = dim + 1;
  QuadratureRule default_rule;
  if (!coeffs.is_laplacian() && rule == nullptr) {
    default_rule = gauss_rule(dim, 5);
    rule = &default_rule;
  }
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.num_cells() * nloc * nloc);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const auto grads = barycentric_gradients(mesh, c);
    const double vol = mesh.volume(c);
    std::array<std::array<double, 4>, 4> local{};
    if (coeffs.is_laplacian()) {
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) local[i][j] = vol * dot3(grads[i], grads[j]);
      }
    } else {
      const double det = std::abs(reference_map(mesh, c).jacobian_det);
      for (std::size_t q = 0; q < rule->size(); ++q) {
        const auto& lambda = rule->points[q];
        const Point x = mesh.map_to_physical(c, lambda);
        const double w = rule->weights[q] * det;
        Matrix3 a{};
        if (coeffs.diffusion) {
          a = coeffs.diffusion(x);
        } else {
          for (int k = 0; k < 3; ++k) a[k][k] = 1.0;
        }
        const double a0 = coeffs.reaction ? coeffs.reaction(x) : 0.0;
        for (int i = 0; i < nloc; ++i) {
          for (int j = 0; j < nloc; ++j) {
            // a(phi_j, phi_i) = sum_kl a_kl d_k phi_j d_l phi_i
            double flux = 0.0;
            for (int k = 0; k < dim; ++k) {
              for (int l = 0; l < dim; ++l) flux += a[k][l] * grads[j][k] * grads[i][l];
            }
            local[i][j] += w * (flux + a0 * lambda[i] * lambda[j]);
          }
        }
      }
    }
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      const int di = dofs.dof(v[i]);
      if (di < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int dj = dofs.dof(v[j]);
        if (dj >= 0) triplets.push_back({di, dj, local[i][j]});
      }
    }
  }
  return SparseMatrix::from_triplets(dofs.size(), dofs.size(), std::move(triplets));
}

namespace {

template <typename DofOf>
SparseMatrix mass_with(const Mesh& mesh, int n, DofOf dof_of) {
  const int dim = mesh.dim();
  const int nloc = dim + 1;
  // Exact P1 mass: |T| (1 + delta_ij) / ((d+1)(d+2)).
  const double denom = (dim + 1.0) * (dim + 2.0);
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.num_cells() * nloc * nloc);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const double vol = mesh.volume(c);
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      const int di = dof_of(v[i]);
      if (di < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int dj = dof_of(v[j]);
        if (dj >= 0) triplets.push_back({di, dj, vol * (i == j ? 2.0 : 1.0) / denom});
      }
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(triplets));
}

}  // namespace

SparseMatrix assemble_mass(const DofMap& dofs) {
  return mass_with(dofs.mesh(), dofs.size(), [&dofs](int v) { return dofs.dof(v); });
}

SparseMatrix assemble_full_mass(const Mesh& mesh) {
  return mass_with(mesh, static_cast<int>(mesh.num_vertices()), [](int v) { return v; });
}

SparseMatrix assemble_point_matrix(const DofMap& dofs, const Point& omega) {
  const Vector g = assemble_point_load(dofs, omega, 1.0);
  std::vector<Triplet> triplets;
  for (int i = 0; i < dofs.size(); ++i) {
    if (g[i] == 0.0) continue;
    for (int j = 0; j < dofs.size(); ++j) {
      if (g[j] != 0.0) triplets.push_back({i, j, g[i] * g[j]});
    }
  }
  return SparseMatrix::from_triplets(dofs.size(), dofs.size(), std::move(triplets));
}

SparseMatrix assemble_weighted_mass(const DofMap& dofs, const CellFunction& weight,
                                    const QuadratureRule& rule) {
  const Mesh& mesh = dofs.mesh();
  const int nloc = mesh.dim() + 1;
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.num_cells() * nloc * nloc);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const double det = std::abs(reference_map(mesh, c).jacobian_det);
    std::array<std::array<double, 4>, 4> local{};
    bool any = false;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lambda = rule.points[q];
      const double cq = weight(c, lambda, mesh.map_to_physical(c, lambda));
      if (cq == 0.0) continue;
      any = true;
      const double w = rule.weights[q] * det * cq;
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) local[i][j] += w * lambda[i] * lambda[j];
      }
    }
    if (!any) continue;
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      const int di = dofs.dof(v[i]);
      if (di < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int dj = dofs.dof(v[j]);
        if (dj >= 0) triplets.push_back({di, dj, local[i][j]});
      }
    }
  }
  return SparseMatrix::from_triplets(dofs.size(), dofs.size(), std::move(triplets));
}

Vector assemble_load(const DofMap& dofs, const ScalarField& f, const QuadratureRule& rule) {
  const Mesh& mesh = dofs.mesh();
  const int nloc = mesh.dim() + 1;
  Vector load(dofs.size(), 0.0);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const double det = std::abs(reference_map(mesh, c).jacobian_det);
    std::array<double, 4> local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lambda = rule.points[q];
      const double fq = f(mesh.map_to_physical(c, lambda)) * rule.weights[q] * det;
      for (int i = 0; i < nloc; ++i) local[i] += fq * lambda[i];
    }
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      const int di = dofs.dof(v[i]);
      if (di >= 0) load[di] += local[i];
    }
  }
  return load;
}

Vector assemble_point_load(const DofMap& dofs, const Point& omega, double g) {
  const auto location = locate_point(dofs.mesh(), omega);
  Vector load(dofs.size(), 0.0);
  const auto v = dofs.mesh().cell(location.cell_index);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int d = dofs.dof(v[i]);
    if (d >= 0) load[d] += g * location.barycentric[i];
  }
  return load;
}

double evaluate(const FeFunction& fe, const Point& x) {
  PointLocation location;
  try {
    location = locate_point(fe.dofs->mesh(), x);
  } catch (const PointOutsideMesh&) {
    return 0.0;
  }
  return fe.value_in_cell(location.cell_index, location.barycentric);
}

CellFunction as_cell_function(const FeFunction& fe) {
  return [fe](int cell, const Barycentric& lambda, const Point&) { return fe.value_in_cell(cell, lambda); };
}

double l2_error(const Mesh& mesh, const CellFunction& approx, const ScalarField& exact,
                const QuadratureRule& rule) {
  double total = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const double det = std::abs(reference_map(mesh, c).jacobian_det);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lambda = rule.points[q];
      const Point x = mesh.map_to_physical(c, lambda);
      const double diff = approx(c, lambda, x) - (exact ? exact(x) : 0.0);
      local += rule.weights[q] * diff * diff;
    }
    total += det * local;
  }
  return std::sqrt(total);
}

double l2_norm(const Mesh& mesh, const CellFunction& f, const QuadratureRule& rule) {
  return l2_error(mesh, f, ScalarField{}, rule);
}

}  // namespace pointctl

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pointctl/mesh.hpp"
#include "pointctl/quadrature.hpp"
#include "pointctl/sparse.hpp"

namespace pointctl {

/// Numbering of the interior vertices; boundary vertices carry no DoF
/// (homogeneous Dirichlet data is eliminated).
class DofMap {
 public:
  explicit DofMap(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int size() const { return static_cast<int>(interior_.size()); }
  /// DoF of a vertex, or -1 for boundary vertices.
  int dof(int vertex) const { return vertex_to_dof_[vertex]; }
  std::span<const int> interior_vertices() const { return interior_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<int> interior_;
  std::vector<int> vertex_to_dof_;
};

/// Piecewise linear function, zero on the boundary and outside the mesh.
struct FeFunction {
  std::shared_ptr<const DofMap> dofs;
  Vector coefficients;

  FeFunction() = default;
  explicit FeFunction(std::shared_ptr<const DofMap> map);
  FeFunction(std::shared_ptr<const DofMap> map, Vector values);

  double value_in_cell(int cell, const Barycentric& lambda) const;
  /// Vertex values including the zero boundary values.
  Vector vertex_values() const;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;
using TensorField = std::function<Matrix3(const Point&)>;

/// Function evaluated at a point known to lie in `cell` with the given
/// barycentric coordinates; avoids a point location per evaluation.
using CellFunction = std::function<double(int cell, const Barycentric& lambda, const Point& x)>;

/// Coefficients of A z = -div(a grad z) + a0 z. Empty members mean the
/// identity tensor and zero reaction, i.e. A = -Laplace.
struct CoefficientField {
  TensorField diffusion;
  ScalarField reaction;

  bool is_laplacian() const { return !diffusion && !reaction; }
};

/// Smallest eigenvalue of the diffusion tensor over the quadrature points;
/// throws InvalidProblem if it is not positive or if the reaction is negative.
double check_ellipticity(const Mesh& mesh, const CoefficientField& coeffs, const QuadratureRule& rule);

/// Gradients of the barycentric coordinates of a cell (constant per cell).
std::array<Point, 4> barycentric_gradients(const Mesh& mesh, int cell);

/// A_{z zbar} = a(phi_z, phi_zbar) over interior DoFs.
SparseMatrix assemble_stiffness(const DofMap& dofs, const CoefficientField& coeffs = {},
                                const QuadratureRule* rule = nullptr);

/// Exact P1 mass matrix M_{z zbar} = (phi_z, phi_zbar).
SparseMatrix assemble_mass(const DofMap& dofs);

/// Mass matrix of every vertex, boundary included.
SparseMatrix assemble_full_mass(const Mesh& mesh);

/// (M_omega)_{z zbar} = phi_z(omega) phi_zbar(omega). Throws PointOutsideMesh.
SparseMatrix assemble_point_matrix(const DofMap& dofs, const Point& omega);

/// Q(c phi_z phi_zbar) with c evaluated at the quadrature points.
SparseMatrix assemble_weighted_mass(const DofMap& dofs, const CellFunction& weight,
                                    const QuadratureRule& rule);

/// F_z = Q(f phi_z).
Vector assemble_load(const DofMap& dofs, const ScalarField& f, const QuadratureRule& rule);

/// (G_omega)_z = g phi_z(omega).
Vector assemble_point_load(const DofMap& dofs, const Point& omega, double g);

/// Point value of a finite element function; zero outside the mesh.
double evaluate(const FeFunction& fe, const Point& x);

CellFunction as_cell_function(const FeFunction& fe);

/// sqrt(Q((approx - exact)^2)) over the mesh.
double l2_error(const Mesh& mesh, const CellFunction& approx, const ScalarField& exact,
                const QuadratureRule& rule);

double l2_norm(const Mesh& mesh, const CellFunction& f, const QuadratureRule& rule);

}  // namespace pointctl

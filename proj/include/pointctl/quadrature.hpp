#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pointctl/mesh.hpp"

namespace pointctl {

/// Quadrature rule on the reference simplex. Points are barycentric tuples,
/// weights sum to the reference volume (1/2 in 2D, 1/6 in 3D).
struct QuadratureRule {
  int dim = 2;
  int degree = 1;
  std::vector<Barycentric> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Affine reference map F_T(x) = offset + jacobian * x of one cell.
struct ReferenceMap {
  int cell_index = -1;
  std::array<std::array<double, 3>, 3> jacobian{};
  double jacobian_det = 0.0;
  Point offset{};

  Point operator()(const Point& reference) const;
};

ReferenceMap reference_map(const Mesh& mesh, int cell);

/// Rule with positive weights that integrates polynomials of total degree
/// `degree` exactly. Supported degrees are 1..10; otherwise UnsupportedDegree.
QuadratureRule gauss_rule(int dim, int degree);

using ScalarField = std::function<double(const Point&)>;

/// Sum over cells and quadrature points of w_q |det DF_T| f(F_T(x_q)).
double integrate(const Mesh& mesh, const QuadratureRule& rule, const ScalarField& integrand);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace pointctl

#include "pointctl/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pointctl/errors.hpp"

namespace pointctl {

namespace {

QuadratureRule centroid_rule(int dim) {
  QuadratureRule rule{dim, 1, {}, {}};
  const double c = 1.0 / (dim + 1);
  rule.points.push_back(dim == 2 ? Barycentric{c, c, c, 0.0} : Barycentric{c, c, c, c});
  rule.weights.push_back(dim == 2 ? 0.5 : 1.0 / 6.0);
  return rule;
}

QuadratureRule triangle_degree2() {
  QuadratureRule rule{2, 2, {}, {}};
  const double a = 2.0 / 3.0;
  const double b = 1.0 / 6.0;
  rule.points = {{a, b, b, 0.0}, {b, a, b, 0.0}, {b, b, a, 0.0}};
  rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  return rule;
}

// Radon's 7-point rule.
QuadratureRule triangle_degree5() {
  QuadratureRule rule{2, 5, {}, {}};
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0;
  const double b1 = (9.0 + 2.0 * s) / 21.0;
  const double a2 = (6.0 + s) / 21.0;
  const double b2 = (9.0 - 2.0 * s) / 21.0;
  const double w1 = (155.0 - s) / 2400.0;
  const double w2 = (155.0 + s) / 2400.0;
  const double c = 1.0 / 3.0;
  rule.points = {{c, c, c, 0.0},    {a1, a1, b1, 0.0}, {a1, b1, a1, 0.0}, {b1, a1, a1, 0.0},
                 {a2, a2, b2, 0.0}, {a2, b2, a2, 0.0}, {b2, a2, a2, 0.0}};
  rule.weights = {9.0 / 80.0, w1, w1, w1, w2, w2, w2};
  return rule;
}

QuadratureRule tetrahedron_degree2() {
  QuadratureRule rule{3, 2, {}, {}};
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  rule.points = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
  rule.weights = {1.0 / 24.0, 1.0 / 24.0, 1.0 / 24.0, 1.0 / 24.0};
  return rule;
}

// Conical product of Gauss-Legendre rules through the collapsed (Duffy) map.
// The Jacobian factor (1-u)^(dim-1) raises the degree in u by dim-1.
QuadratureRule collapsed_rule(int dim, int degree) {
  const int m = (degree + dim + 1) / 2;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(m, x, w);
  QuadratureRule rule{dim, degree, {}, {}};
  if (dim == 2) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double u = x[i];
        const double v = x[j];
        const double px = u;
        const double py = (1.0 - u) * v;
        rule.points.push_back({1.0 - px - py, px, py, 0.0});
        rule.weights.push_back(w[i] * w[j] * (1.0 - u));
      }
    }
    return rule;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double u = x[i];
        const double v = x[j];
        const double t = x[k];
        const double px = u;
        const double py = (1.0 - u) * v;
        const double pz = (1.0 - u) * (1.0 - v) * t;
        rule.points.push_back({1.0 - px - py - pz, px, py, pz});
        rule.weights.push_back(w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
      }
    }
  }
  return rule;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Map [-1,1] -> [0,1]; nodes ascend.
    nodes[n - 1 - i] = 0.5 * (z + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

Point ReferenceMap::operator()(const Point& reference) const {
  Point x = offset;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) x[r] += jacobian[r][c] * reference[c];
  }
  return x;
}

ReferenceMap reference_map(const Mesh& mesh, int cell) {
  ReferenceMap map;
  map.cell_index = cell;
  const auto v = mesh.cell(cell);
  map.offset = mesh.vertex(v[0]);
  for (int c = 0; c < mesh.dim(); ++c) {
    const Point& vc = mesh.vertex(v[c + 1]);
    for (int r = 0; r < 3; ++r) map.jacobian[r][c] = vc[r] - map.offset[r];
  }
  const auto& J = map.jacobian;
  if (mesh.dim() == 2) {
    map.jacobian_det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  } else {
    map.jacobian_det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
  }
  return map;
}

QuadratureRule gauss_rule(int dim, int degree) {
  if (dim != 2 && dim != 3) throw UnsupportedDegree("quadrature dimension must be 2 or 3");
  if (degree < 1 || degree > 10) {
    throw UnsupportedDegree("quadrature degree " + std::to_string(degree) +
                            " outside the supported range 1..10");
  }
  if (degree == 1) return centroid_rule(dim);
  if (dim == 2) {
    if (degree == 2) return triangle_degree2();
    if (degree <= 5) {
      auto rule = triangle_degree5();
      rule.degree = degree;
      return rule;
    }
    return collapsed_rule(2, degree);
  }
  if (degree == 2) return tetrahedron_degree2();
  return collapsed_rule(3, degree);
}

double integrate(const Mesh& mesh, const QuadratureRule& rule, const ScalarField& integrand) {
  double total = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const double det = std::abs(reference_map(mesh, c).jacobian_det);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      local += rule.weights[q] * integrand(mesh.map_to_physical(c, rule.points[q]));
    }
    total += det * local;
  }
  return total;
}

}  // namespace pointctl

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pointctl/errors.hpp"
#include "pointctl/quadrature.hpp"

using namespace pointctl;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Integral of prod lambda_i^{k_i} over the reference simplex:
// prod k_i! / (sum k_i + dim)!.
double simplex_moment(int dim, const std::array<int, 4>& k) {
  double num = 1.0;
  int total = 0;
  for (int i = 0; i <= dim; ++i) {
    num *= factorial(k[i]);
    total += k[i];
  }
  return num / factorial(total + dim);
}

double apply_rule(const QuadratureRule& rule, const std::array<int, 4>& k) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    double value = 1.0;
    for (int i = 0; i <= rule.dim; ++i) value *= std::pow(rule.points[q][i], k[i]);
    sum += rule.weights[q] * value;
  }
  return sum;
}

}  // namespace

TEST(GaussRule, WeightsPositiveAndSumToReferenceVolume) {
  for (int dim : {2, 3}) {
    for (int degree = 1; degree <= 10; ++degree) {
      const QuadratureRule rule = gauss_rule(dim, degree);
      EXPECT_EQ(rule.dim, dim);
      EXPECT_GE(rule.degree, degree);
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        EXPECT_GT(rule.weights[q], 0.0);
        double lsum = 0.0;
        for (int i = 0; i <= dim; ++i) {
          EXPECT_GE(rule.points[q][i], 0.0);
          lsum += rule.points[q][i];
        }
        EXPECT_NEAR(lsum, 1.0, 1e-14);
        sum += rule.weights[q];
      }
      EXPECT_NEAR(sum, dim == 2 ? 0.5 : 1.0 / 6.0, 1e-14);
    }
  }
}

TEST(GaussRule, ExactForAllMonomialsUpToDegree) {
  for (int dim : {2, 3}) {
    for (int degree = 1; degree <= 10; ++degree) {
      const QuadratureRule rule = gauss_rule(dim, degree);
      for (int a = 0; a <= degree; ++a) {
        for (int b = 0; a + b <= degree; ++b) {
          for (int c = 0; a + b + c <= degree; ++c) {
            const int d_max = dim == 3 ? degree - a - b - c : 0;
            for (int d = 0; d <= d_max; ++d) {
              const std::array<int, 4> k{a, b, c, d};
              EXPECT_NEAR(apply_rule(rule, k), simplex_moment(dim, k), 1e-14)
                  << "dim " << dim << " degree " << degree << " exponents " << a << b << c << d;
            }
          }
        }
      }
    }
  }
}

TEST(GaussRule, UnsupportedDegrees) {
  EXPECT_THROW(gauss_rule(2, 0), UnsupportedDegree);
  EXPECT_THROW(gauss_rule(2, 11), UnsupportedDegree);
  EXPECT_THROW(gauss_rule(3, 11), UnsupportedDegree);
}

TEST(GaussLegendre, IntegratesPolynomialsOnUnitInterval) {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  ASSERT_EQ(x.size(), 5u);
  for (int k = 0; k <= 9; ++k) {
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += w[i] * std::pow(x[i], k);
    EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-14);
  }
}

TEST(ReferenceMapTest, MapsReferenceVerticesAndDeterminant) {
  const Mesh mesh = build_unit_square(2);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const ReferenceMap map = reference_map(mesh, c);
    EXPECT_NEAR(std::abs(map.jacobian_det) / 2.0, mesh.volume(c), 1e-15);
    const Point corners[3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    for (int i = 0; i < 3; ++i) {
      const Point x = map(corners[i]);
      const Point& v = mesh.vertex(mesh.cell(c)[i]);
      for (int d = 0; d < 3; ++d) EXPECT_NEAR(x[d], v[d], 1e-15);
    }
  }
}

TEST(Integrate, ConstantOnSquareAndPolynomial) {
  const Mesh mesh = build_unit_square(4);
  const QuadratureRule rule = gauss_rule(2, 4);
  EXPECT_NEAR(integrate(mesh, rule, [](const Point&) { return 1.0; }), 1.0, 1e-14);
  // int x^2 y^2 = 1/9.
  EXPECT_NEAR(integrate(mesh, rule, [](const Point& x) { return x[0] * x[0] * x[1] * x[1]; }), 1.0 / 9.0,
              1e-14);
}

TEST(Integrate, DiskAreaApproachesPi) {
  const QuadratureRule rule = gauss_rule(2, 1);
  double previous = 1.0;
  for (int level = 0; level < 5; ++level) {
    const double gap = std::numbers::pi - integrate(build_unit_disk(level), rule, [](const Point&) { return 1.0; });
    EXPECT_GT(gap, 0.0);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 2e-3);
}

TEST(Integrate, LogSquaredOnDiskConverges) {
  // int_{B_1} (log|x| / (2 pi))^2 dx = 1 / (8 pi).
  const QuadratureRule rule = gauss_rule(2, 10);
  const ScalarField f = [](const Point& x) {
    const double r = std::hypot(x[0], x[1]);
    const double v = std::log(r) / (2.0 * std::numbers::pi);
    return v * v;
  };
  const double exact = 1.0 / (8.0 * std::numbers::pi);
  double previous = 1.0;
  for (int level = 1; level < 6; ++level) {
    const double err = std::abs(integrate(build_unit_disk(level), rule, f) - exact);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous / exact, 2e-3);
}

TEST(Integrate, BallVolumeApproachesFourThirdsPi) {
  const QuadratureRule rule = gauss_rule(3, 1);
  const double exact = 4.0 * std::numbers::pi / 3.0;
  const double coarse = exact - integrate(build_unit_ball(1), rule, [](const Point&) { return 1.0; });
  const double fine = exact - integrate(build_unit_ball(3), rule, [](const Point&) { return 1.0; });
  EXPECT_GT(fine, 0.0);
  EXPECT_LT(fine, coarse / 8.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "pointctl/bench.hpp"
#include "pointctl/errors.hpp"
#include "pointctl/optctl.hpp"

using namespace pointctl;

namespace {

std::shared_ptr<const DofMap> dofs_of(Mesh mesh) {
  return std::make_shared<DofMap>(std::make_shared<Mesh>(std::move(mesh)));
}

ProblemSpec square_spec(int n, std::vector<ObservationPoint> points, double nu = 1.0) {
  ProblemSpec spec;
  spec.dofs = dofs_of(build_unit_square(n));
  spec.points = std::move(points);
  spec.nu = nu;
  return spec;
}

Vector random_vector(int n, std::mt19937& rng, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = scale * std::uniform_real_distribution<double>(-1, 1)(rng);
  return v;
}

CellFunction constant(double c) {
  return [c](int, const Barycentric&, const Point&) { return c; };
}

// Square mesh reflected at x = 1/2, cells reoriented.
Mesh mirrored_square(int n) {
  const Mesh base = build_unit_square(n);
  std::vector<Point> vertices = base.vertices();
  for (Point& v : vertices) v[0] = 1.0 - v[0];
  std::vector<Cell> cells = base.cells();
  for (Cell& c : cells) std::swap(c[1], c[2]);
  return Mesh(2, vertices, cells);
}

}  // namespace

TEST(ProjectBox, ClampAndIdentity) {
  EXPECT_EQ(project_box(5.0, -kInfinity, kInfinity), 5.0);
  EXPECT_EQ(project_box(-12.0, -10.0, 10.0), -10.0);
  EXPECT_EQ(project_box(12.0, -10.0, 10.0), 10.0);
  std::mt19937 rng(1);
  for (int k = 0; k < 100; ++k) {
    const double v = std::uniform_real_distribution<double>(-30, 30)(rng);
    const double once = project_box(v, -10.0, 10.0);
    EXPECT_GE(once, -10.0);
    EXPECT_LE(once, 10.0);
    EXPECT_EQ(project_box(once, -10.0, 10.0), once);
  }
}

TEST(SolveState, ZeroLoadGivesZero) {
  const OptimalControlProblem problem(square_spec(8, {{{0.5, 0.5, 0}, 0.0}}));
  const FeFunction y = problem.solve_state(constant(0.0));
  for (double v : y.coefficients) EXPECT_EQ(v, 0.0);
}

TEST(SolveState, UnitLoadCenterValue) {
  // Series solution of -Laplace y = 1 on the unit square: y(1/2,1/2) = 0.0736713...
  const OptimalControlProblem problem(square_spec(64, {{{0.3, 0.3, 0}, 0.0}}));
  const FeFunction y = problem.solve_state(constant(1.0));
  EXPECT_NEAR(evaluate(y, {0.5, 0.5, 0}), 0.0736713, 2e-4);
}

TEST(SolveState, ManufacturedBubbleConvergesQuadratically) {
  const ScalarField exact = [](const Point& x) { return x[0] * (1 - x[0]) * x[1] * (1 - x[1]); };
  const CellFunction load = [](int, const Barycentric&, const Point& x) {
    return 2.0 * (x[0] * (1 - x[0]) + x[1] * (1 - x[1]));
  };
  std::vector<double> errors;
  for (int n : {8, 16, 32}) {
    const OptimalControlProblem problem(square_spec(n, {{{0.3, 0.3, 0}, 0.0}}));
    const FeFunction y = problem.solve_state(load);
    errors.push_back(l2_error(problem.dofs().mesh(), as_cell_function(y), exact, gauss_rule(2, 6)));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_NEAR(std::log2(errors[i - 1] / errors[i]), 2.0, 0.1);
}

TEST(SolveAdjoint, MatchedTargetsGiveZero) {
  std::mt19937 rng(2);
  ProblemSpec spec = square_spec(8, {{{0.3, 0.4, 0}, 0.0}, {{0.7, 0.6, 0}, 0.0}});
  const auto dofs = spec.dofs;
  const FeFunction y(dofs, random_vector(dofs->size(), rng));
  for (auto& pt : spec.points) pt.target = evaluate(y, pt.location);
  const OptimalControlProblem problem(spec);
  const FeFunction p = problem.solve_adjoint(y);
  for (double v : p.coefficients) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(SolveAdjoint, VertexPointGivesGreenColumn) {
  const OptimalControlProblem problem(square_spec(8, {{{0.5, 0.5, 0}, 0.0}}));
  const DofMap& dofs = problem.dofs();
  const int z = dofs.dof(4 * 9 + 4);
  Vector unit(dofs.size(), 0.0);
  unit[z] = 1.0;
  const FeFunction y(problem.spec().dofs, unit);  // y(w) - g = 1
  const FeFunction p = problem.solve_adjoint(y);
  const Vector oracle = dense_solve_oracle(problem.stiffness().transposed().to_dense(), unit);
  EXPECT_LT(max_abs_difference(p.coefficients, oracle), 1e-10);
}

TEST(SolveAdjoint, SuperpositionOfPointAdjoints) {
  std::mt19937 rng(3);
  const Point w1{0.31, 0.42, 0}, w2{0.77, 0.2, 0};
  const OptimalControlProblem problem(square_spec(16, {{w1, 0.5}, {w2, -0.25}}));
  const FeFunction y(problem.spec().dofs, random_vector(problem.dofs().size(), rng));
  const FeFunction p = problem.solve_adjoint(y);
  const FeFunction p1 = problem.point_adjoint(w1);
  const FeFunction p2 = problem.point_adjoint(w2);
  const double m1 = evaluate(y, w1) - 0.5;
  const double m2 = evaluate(y, w2) + 0.25;
  Vector sum(p.coefficients.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = m1 * p1.coefficients[i] + m2 * p2.coefficients[i];
  EXPECT_LT(max_abs_difference(p.coefficients, sum), 1e-10);
}

TEST(SolveAdjoint, DualityWithStateSolve) {
  // (eta, p_w)_Q = (S eta)(w) for the adjoint of point evaluation.
  std::mt19937 rng(4);
  for (const Mesh& mesh : {build_unit_square(8), build_unit_disk(1), build_unit_ball(1)}) {
    ProblemSpec spec;
    spec.dofs = dofs_of(mesh);
    const Point w = mesh.dim() == 3 ? Point{0.1, -0.2, 0.15} : (mesh_volume(mesh) < 1.01 ? Point{0.35, 0.55, 0}
                                                                                          : Point{-0.2, 0.3, 0});
    spec.points = {{w, 0.0}};
    const OptimalControlProblem problem(spec);
    const FeFunction pw = problem.point_adjoint(w);
    for (int k = 0; k < 20; ++k) {
      const double a = std::uniform_real_distribution<double>(-1, 1)(rng);
      const double b = std::uniform_real_distribution<double>(-3, 3)(rng);
      const CellFunction eta = [a, b](int, const Barycentric&, const Point& x) {
        return a + std::sin(b * x[0]) * std::cos(x[1] + b);
      };
      const double lhs = dot(problem.control_load(eta), pw.coefficients);
      const double rhs = evaluate(problem.solve_state(eta), w);
      EXPECT_NEAR(lhs, rhs, 1e-9);
    }
  }
}

TEST(Residual, ZeroIterateDirectFormula) {
  ProblemSpec spec = square_spec(8, {{{0.3, 0.4, 0}, 1.0}, {{0.6, 0.55, 0}, 1.0}});
  spec.lower = -10;
  spec.upper = 10;
  const OptimalControlProblem problem(spec);
  const FeFunction zero(spec.dofs);
  const ResidualPair r = problem.residual(zero, zero);
  for (double v : r.r_state) EXPECT_EQ(v, 0.0);
  const Vector g1 = assemble_point_load(*spec.dofs, spec.points[0].location, 1.0);
  const Vector g2 = assemble_point_load(*spec.dofs, spec.points[1].location, 1.0);
  for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(r.r_adjoint[i], g1[i] + g2[i], 1e-15);
}

TEST(Residual, MatchesIndependentFormula) {
  std::mt19937 rng(5);
  ProblemSpec spec = square_spec(8, {{{0.3, 0.4, 0}, 0.7}, {{0.6, 0.55, 0}, -0.2}}, 0.1);
  spec.lower = -1.0;
  spec.upper = 2.0;
  spec.forcing = [](const Point& x) { return x[0] - x[1] * x[1]; };
  const OptimalControlProblem problem(spec);
  const DofMap& dofs = problem.dofs();
  const Mesh& mesh = dofs.mesh();
  const QuadratureRule& rule = problem.rule();
  for (int trial = 0; trial < 5; ++trial) {
    const FeFunction y(spec.dofs, random_vector(dofs.size(), rng));
    const FeFunction p(spec.dofs, random_vector(dofs.size(), rng, 0.5));
    const ResidualPair r = problem.residual(y, p);

    Vector state = problem.stiffness() * y.coefficients;
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
      const auto v = mesh.cell(c);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Barycentric& l = rule.points[q];
        const Point x = mesh.map_to_physical(c, l);
        double pv = 0.0;
        for (int i = 0; i < 3; ++i)
          if (dofs.dof(v[i]) >= 0) pv += l[i] * p.coefficients[dofs.dof(v[i])];
        const double u = std::min(2.0, std::max(-1.0, -pv / 0.1));
        const double w = rule.weights[q] * 2.0 * mesh.volume(c) * (u + spec.forcing(x));
        for (int i = 0; i < 3; ++i)
          if (dofs.dof(v[i]) >= 0) state[dofs.dof(v[i])] -= w * l[i];
      }
    }
    Vector adjoint = problem.stiffness() * p.coefficients;
    for (const auto& pt : spec.points) {
      const Vector g = assemble_point_load(dofs, pt.location, evaluate(y, pt.location) - pt.target);
      for (std::size_t i = 0; i < g.size(); ++i) adjoint[i] -= g[i];
    }
    EXPECT_LT(max_abs_difference(r.r_state, state), 1e-12);
    EXPECT_LT(max_abs_difference(r.r_adjoint, adjoint), 1e-12);
  }
}

TEST(ZNorm, DefinitionAndDenseOracle) {
  const OptimalControlProblem problem(square_spec(8, {{{0.5, 0.5, 0}, 0.0}}));
  const int n = problem.dofs().size();
  EXPECT_EQ(problem.z_norm(Vector(n, 0.0)), 0.0);

  std::mt19937 rng(6);
  const SparseMatrix& l = problem.laplacian();
  const Vector w = random_vector(n, rng);
  const Vector r = l * w;
  EXPECT_NEAR(problem.z_norm(r), std::sqrt(dot(w, r)), 1e-10);

  const Vector r2 = random_vector(n, rng);
  const Vector w2 = dense_solve_oracle(l.to_dense(), r2);
  EXPECT_NEAR(problem.z_norm(r2), std::sqrt(dot(w2, r2)), 1e-9);
  const ResidualPair pair{r, r2};
  EXPECT_NEAR(problem.z_norm(pair), std::hypot(problem.z_norm(r), problem.z_norm(r2)), 1e-12);
}

TEST(ZNorm, UsesLaplacianEvenWithCoefficients) {
  ProblemSpec spec = square_spec(4, {{{0.5, 0.5, 0}, 0.0}});
  spec.coeffs.reaction = [](const Point&) { return 5.0; };
  const OptimalControlProblem problem(spec);
  const SparseMatrix plain = assemble_stiffness(problem.dofs());
  EXPECT_LT(max_abs_difference(problem.laplacian().to_dense(), plain.to_dense()), 1e-15);
  EXPECT_GT(max_abs_difference(problem.stiffness().to_dense(), plain.to_dense()), 0.01);
}

TEST(Jacobian, UnconstrainedCouplingIsMass) {
  std::mt19937 rng(7);
  const OptimalControlProblem problem(square_spec(8, {{{0.5, 0.5, 0}, 1.0}}, 0.3));
  const FeFunction p(problem.spec().dofs, random_vector(problem.dofs().size(), rng));
  const BlockSystem j = problem.newton_jacobian(p);
  EXPECT_EQ(j.coupling_topright.to_dense(), problem.mass().to_dense());
  EXPECT_EQ(j.stiffness.to_dense(), problem.stiffness().to_dense());
}

TEST(Jacobian, FullyActiveLowerBoundGivesZeroCoupling) {
  ProblemSpec spec = square_spec(8, {{{0.5, 0.5, 0}, 1.0}});
  spec.lower = 1.0;
  spec.upper = 10.0;
  const OptimalControlProblem problem(spec);
  const BlockSystem j = problem.newton_jacobian(FeFunction(spec.dofs));
  for (double v : j.coupling_topright.values()) EXPECT_EQ(v, 0.0);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937 rng(8);
  ProblemSpec spec = square_spec(8, {{{0.3, 0.4, 0}, 0.7}, {{0.6, 0.55, 0}, -0.2}}, 0.1);
  spec.lower = -1.0;
  spec.upper = 1.0;
  const OptimalControlProblem problem(spec);
  const int n = problem.dofs().size();
  const FeFunction y(spec.dofs, random_vector(n, rng));
  const FeFunction p(spec.dofs, random_vector(n, rng, 0.2));
  const Vector dy = random_vector(n, rng);
  const Vector dp = random_vector(n, rng);
  const double t = 1e-6;
  FeFunction y2 = y, p2 = p;
  for (int i = 0; i < n; ++i) {
    y2.coefficients[i] += t * dy[i];
    p2.coefficients[i] += t * dp[i];
  }
  const ResidualPair r0 = problem.residual(y, p);
  const ResidualPair r1 = problem.residual(y2, p2);
  const BlockSystem j = problem.newton_jacobian(p);
  Vector dir = dy;
  dir.insert(dir.end(), dp.begin(), dp.end());
  const Vector jd = j.monolithic(spec.nu) * dir;
  // No quadrature point may cross a kink between p and p + t dp.
  double fd_err = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    fd_err = std::max(fd_err, std::abs((r1.r_state[i] - r0.r_state[i]) / t - jd[i]));
    fd_err = std::max(fd_err, std::abs((r1.r_adjoint[i] - r0.r_adjoint[i]) / t - jd[n + i]));
    scale = std::max(scale, std::abs(jd[i]) + std::abs(jd[n + i]));
  }
  EXPECT_LT(fd_err, 1e-6 * scale);
}

TEST(NewtonSolve, ZeroProblemNeedsNoStep) {
  ProblemSpec spec = square_spec(8, {{{0.5, 0.5, 0}, 0.0}});
  spec.lower = -1;
  spec.upper = 1;
  const OptimalControlSolution sol = solve(spec);
  EXPECT_EQ(sol.log.iterations(), 0);
  EXPECT_TRUE(sol.log.converged);
  for (double v : sol.y.coefficients) EXPECT_EQ(v, 0.0);
  for (double v : sol.p.coefficients) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(sol.control_at({0.3, 0.3, 0}), 0.0);
}

TEST(NewtonSolve, UnconstrainedTakesOneStepAndSolvesLinearSystem) {
  const ProblemSpec spec = square_spec(16, {{{0.3, 0.4, 0}, 1.0}, {{0.7, 0.5, 0}, -0.5}}, 1e-2);
  const OptimalControlProblem problem(spec);
  const OptimalControlSolution sol = problem.solve();
  EXPECT_EQ(sol.log.iterations(), 1);
  EXPECT_LE(sol.log.residuals.back(), 1e-8);
  const ResidualPair r = problem.residual(sol.y, sol.p);
  double worst = 0.0;
  for (double v : r.r_state) worst = std::max(worst, std::abs(v));
  for (double v : r.r_adjoint) worst = std::max(worst, std::abs(v));
  EXPECT_LE(worst, 1e-9);
}

TEST(NewtonSolve, Benchmark2dCoarseLevelError) {
  // Reference value 0.0160362 on the 81-vertex mesh, matched to 25 %.
  const ExactBenchmark bench = benchmark_2d();
  const ProblemSpec spec = bench.family.spec(1);
  ASSERT_EQ(spec.mesh().num_vertices(), 81u);
  const OptimalControlSolution sol = solve(spec);
  EXPECT_EQ(sol.log.iterations(), 1);
  const double err = l2_error(spec.mesh(), sol.control_function(), bench.exact_u, gauss_rule(2, 10));
  EXPECT_NEAR(err, 0.0160362, 0.25 * 0.0160362);
}

TEST(NewtonSolve, ConstrainedThreeStepsOnCoarseLevels) {
  for (int level = 1; level <= 3; ++level) {
    const OptimalControlSolution sol = solve(constrained_2d(level));
    EXPECT_EQ(sol.log.iterations(), 3) << "level " << level;
  }
}

TEST(NewtonSolve, MonotoneTailOnBenchmarks) {
  std::vector<ProblemSpec> specs{benchmark_2d().family.spec(2), benchmark_3d().family.spec(1), constrained_2d(2),
                                 five_point_2d(16, 1e-3)};
  for (const ProblemSpec& spec : specs) {
    const NewtonLog log = solve(spec).log;
    const auto& d = log.residuals;
    ASSERT_GE(d.size(), 2u);
    EXPECT_LE(d.back(), 1e-8);
    for (std::size_t k = d.size() >= 3 ? d.size() - 2 : 1; k < d.size(); ++k) EXPECT_LT(d[k], d[k - 1]);
  }
}

TEST(NewtonSolve, ComplementarityAtQuadraturePoints) {
  const ProblemSpec spec = constrained_2d(1);
  const OptimalControlProblem problem(spec);
  const OptimalControlSolution sol = problem.solve();
  const Mesh& mesh = spec.mesh();
  const QuadratureRule& rule = problem.rule();
  int active = 0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c)
    for (const Barycentric& l : rule.points) {
      const double u = sol.control(c, l);
      EXPECT_EQ(u, project_box(-sol.p.value_in_cell(c, l) / spec.nu, spec.lower, spec.upper));
      EXPECT_GE(u, spec.lower);
      EXPECT_LE(u, spec.upper);
      if (std::abs(u) == 10.0) ++active;
    }
  EXPECT_GT(active, 0);
}

TEST(NewtonSolve, ObjectiveNotImprovedByFeasiblePerturbations) {
  const ProblemSpec spec = constrained_2d(1);
  const OptimalControlProblem problem(spec);
  const OptimalControlSolution sol = problem.solve(1e-12);
  const CellFunction u = sol.control_function();
  const double best = problem.objective(u);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> coef(-1, 1);
  for (int k = 0; k < 100; ++k) {
    const double amp = std::pow(10.0, std::uniform_real_distribution<double>(-3, 0)(rng));
    const double a = coef(rng), b = coef(rng), fx = 1 + 5 * std::abs(coef(rng)), fy = 1 + 5 * std::abs(coef(rng));
    const CellFunction v = [&, amp, a, b, fx, fy](int c, const Barycentric& l, const Point& x) {
      const double noise = amp * (a * std::sin(fx * x[0]) + b * std::cos(fy * x[1]));
      return project_box(u(c, l, x) + noise, spec.lower, spec.upper);
    };
    EXPECT_GE(problem.objective(v), best - 1e-12);
  }
}

TEST(NewtonSolve, MirrorAntisymmetry) {
  const int n = 8;
  ProblemSpec base = constrained_2d(1);
  ASSERT_EQ(base.mesh().num_vertices(), static_cast<std::size_t>((n + 1) * (n + 1)));
  ProblemSpec mirrored = base;
  mirrored.dofs = dofs_of(mirrored_square(n));
  const OptimalControlSolution a = solve(base, 1e-12);
  const OptimalControlSolution b = solve(mirrored, 1e-12);
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Point x{u(rng), u(rng), 0};
    EXPECT_NEAR(a.control_at(x), -b.control_at({1.0 - x[0], x[1], 0}), 1e-8);
  }
}

TEST(Validation, RejectsMalformedProblems) {
  const ProblemSpec good = square_spec(4, {{{0.5, 0.5, 0}, 0.0}});
  EXPECT_NO_THROW(validate(good));
  ProblemSpec s = good;
  s.nu = 0.0;
  EXPECT_THROW(validate(s), InvalidProblem);
  s = good;
  s.lower = 1.0;
  s.upper = 1.0;
  EXPECT_THROW(validate(s), InvalidProblem);
  s = good;
  s.points.clear();
  EXPECT_THROW(validate(s), InvalidProblem);
  s = good;
  s.points = {{{1.5, 0.5, 0}, 0.0}};
  EXPECT_THROW(validate(s), InvalidProblem);
  s = good;
  s.points = {{{1.0, 0.5, 0}, 0.0}};
  EXPECT_THROW(validate(s), InvalidProblem);
  s = good;
  s.points = {{{0.5, 0.5, 0}, 0.0}, {{0.5, 0.5, 0}, 1.0}};
  EXPECT_THROW(validate(s), InvalidProblem);
  EXPECT_THROW(OptimalControlProblem{s}, InvalidProblem);
}

TEST(NewtonSolve, IterationCapRaisesWithLog) {
  try {
    solve(constrained_2d(1), 1e-8, 1);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    EXPECT_EQ(e.log().residuals.size(), 2u);
    EXPECT_FALSE(e.log().converged);
  }
}

TEST(NewtonSolve, IterativePathAgreesWithDirectBlocks) {
  OptimalControlProblem direct(constrained_2d(2));
  OptimalControlProblem iterative(constrained_2d(2));
  iterative.set_direct_blocks(false);
  const auto a = direct.solve(1e-10);
  const auto b = iterative.solve(1e-10);
  EXPECT_EQ(a.log.iterations(), b.log.iterations());
  EXPECT_LT(max_abs_difference(a.p.coefficients, b.p.coefficients), 1e-8);
}

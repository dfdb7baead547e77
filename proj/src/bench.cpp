#include "pointctl/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace pointctl {

namespace {

constexpr double kPi = std::numbers::pi;

double radius(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

ScalarField radial_state() {
  return [](const Point& x) { return std::cos(kPi * radius(x) / 2.0); };
}

ProblemSpec origin_problem(std::shared_ptr<const Mesh> mesh, ScalarField forcing) {
  ProblemSpec spec;
  spec.dofs = std::make_shared<DofMap>(std::move(mesh));
  spec.forcing = std::move(forcing);
  spec.nu = 1.0;
  spec.points = {{{0.0, 0.0, 0.0}, 0.0}};
  return spec;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

ExactBenchmark benchmark_2d() {
  ExactBenchmark b;
  b.nu = 1.0;
  b.exact_u = [](const Point& x) { return std::log(radius(x)) / (2.0 * kPi); };
  b.exact_p = [](const Point& x) { return -std::log(radius(x)) / (2.0 * kPi); };
  b.exact_y = radial_state();
  b.forcing = [](const Point& x) {
    const double r = radius(x);
    return kPi / 4.0 * (2.0 / r * std::sin(kPi * r / 2.0) + kPi * std::cos(kPi * r / 2.0)) -
           std::log(r) / (2.0 * kPi);
  };
  b.family.name = "benchmark2d";
  b.family.spec = [forcing = b.forcing](int level) {
    return origin_problem(std::make_shared<Mesh>(build_unit_disk(level)), forcing);
  };
  b.family.h = [](int level) { return std::ldexp(0.5, -level); };
  return b;
}

ExactBenchmark benchmark_3d() {
  ExactBenchmark b;
  b.nu = 1.0;
  b.exact_u = [](const Point& x) { return -(1.0 / radius(x) - 1.0) / (4.0 * kPi); };
  b.exact_p = [](const Point& x) { return (1.0 / radius(x) - 1.0) / (4.0 * kPi); };
  b.exact_y = radial_state();
  b.forcing = [](const Point& x) {
    const double r = radius(x);
    return kPi / 4.0 * (4.0 / r * std::sin(kPi * r / 2.0) + kPi * std::cos(kPi * r / 2.0)) +
           (1.0 / r - 1.0) / (4.0 * kPi);
  };
  b.family.name = "benchmark3d";
  b.family.spec = [forcing = b.forcing](int level) {
    return origin_problem(std::make_shared<Mesh>(build_unit_ball(level)), forcing);
  };
  b.family.h = [](int level) { return std::ldexp(1.0, -level); };
  return b;
}

ProblemSpec constrained_2d(int level) {
  ProblemSpec spec;
  spec.dofs = std::make_shared<DofMap>(std::make_shared<Mesh>(build_unit_square(4 << level)));
  spec.nu = 1e-2;
  spec.lower = -10.0;
  spec.upper = 10.0;
  spec.points = {{{0.2, 0.5, 0.0}, 1.0}, {{0.5, 0.5, 0.0}, 0.0}, {{0.8, 0.5, 0.0}, -1.0}};
  return spec;
}

ProblemFamily constrained_2d_family() {
  return {"constrained2d", constrained_2d, [](int level) { return std::sqrt(2.0) / (4 << level); }};
}

ProblemSpec five_point_2d(int n, double nu) {
  ProblemSpec spec;
  spec.dofs = std::make_shared<DofMap>(std::make_shared<Mesh>(build_unit_square(n)));
  spec.nu = nu;
  for (const auto& [x, y] : {std::pair{0.2, 0.5}, {0.5, 0.5}, {0.8, 0.2}, {0.8, 0.5}, {0.8, 0.8}}) {
    spec.points.push_back({{x, y, 0.0}, 1.0});
  }
  return spec;
}

void fill_eoc(std::vector<ConvergenceRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i == 0) {
      records[i].eoc.reset();
      continue;
    }
    const auto& prev = records[i - 1];
    records[i].eoc = std::log(prev.error / records[i].error) / std::log(prev.h / records[i].h);
  }
}

std::vector<ConvergenceRecord> eoc_study(const ExactBenchmark& benchmark, int levels, const StudyOptions& options) {
  if (levels < 2) throw InvalidProblem("an EOC study needs at least two levels");
  std::vector<ConvergenceRecord> records;
  for (int level = 0; level < levels; ++level) {
    OptimalControlProblem problem(benchmark.family.spec(level));
    problem.set_linear_settings(options.linear);
    const auto solution = problem.solve(options.tol, options.maxit);
    const Mesh& mesh = problem.spec().mesh();
    ConvergenceRecord record;
    record.h = benchmark.family.h(level);
    record.dofs = static_cast<long>(mesh.num_vertices());
    record.error = l2_error(mesh, solution.control_function(), benchmark.exact_u,
                            gauss_rule(mesh.dim(), options.error_degree));
    record.newton_iterations = solution.log.iterations();
    records.push_back(record);
  }
  fill_eoc(records);
  return records;
}

double control_distance(const OptimalControlSolution& fine, const OptimalControlSolution& coarse, int degree) {
  const Mesh& fine_mesh = fine.p.dofs->mesh();
  const Mesh& coarse_mesh = coarse.p.dofs->mesh();
  const QuadratureRule rule = gauss_rule(fine_mesh.dim(), degree);
  const double outside = project_box(0.0, coarse.lower, coarse.upper);
  const int nloc = fine_mesh.dim() + 1;
  int hint = 0;
  double total = 0.0;
  for (int c = 0; c < static_cast<int>(fine_mesh.num_cells()); ++c) {
    const double det = std::abs(reference_map(fine_mesh, c).jacobian_det);
    int coarse_cell = -1;
    try {
      coarse_cell = locate_point(coarse_mesh, fine_mesh.centroid(c), hint).cell_index;
      hint = coarse_cell;
    } catch (const PointOutsideMesh&) {
      coarse_cell = -1;
    }
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& lambda = rule.points[q];
      const Point x = fine_mesh.map_to_physical(c, lambda);
      double coarse_value = outside;
      if (coarse_cell >= 0) {
        Barycentric mu = coarse_mesh.barycentric(coarse_cell, x);
        bool inside = true;
        for (int i = 0; i < nloc; ++i) inside = inside && mu[i] >= -1e-10;
        if (inside) {
          coarse_value = coarse.control(coarse_cell, mu);
        } else {
          coarse_value = coarse.control_at(x);
        }
      }
      const double diff = fine.control(c, lambda) - coarse_value;
      local += rule.weights[q] * diff * diff;
    }
    total += det * local;
  }
  return std::sqrt(total);
}

std::vector<ConvergenceRecord> approx_eoc_study(const ProblemFamily& family, int levels, int fine_level,
                                                const StudyOptions& options) {
  if (levels < 2) throw InvalidProblem("an EOC study needs at least two levels");
  if (fine_level < 0) fine_level = levels + 1;
  if (fine_level < levels - 1) throw InvalidProblem("the reference level must not be coarser than the study levels");
  auto solve_level = [&](int level) {
    OptimalControlProblem problem(family.spec(level));
    problem.set_linear_settings(options.linear);
    return problem.solve(options.tol, options.maxit);
  };
  const OptimalControlSolution reference = solve_level(fine_level);
  std::vector<ConvergenceRecord> records;
  for (int level = 0; level < levels; ++level) {
    const OptimalControlSolution solution = level == fine_level ? reference : solve_level(level);
    ConvergenceRecord record;
    record.h = family.h(level);
    record.dofs = static_cast<long>(solution.p.dofs->mesh().num_vertices());
    record.error = control_distance(reference, solution, options.error_degree);
    record.newton_iterations = solution.log.iterations();
    records.push_back(record);
  }
  fill_eoc(records);
  return records;
}

std::vector<NewtonRateRecord> newton_rate_table(const NewtonLog& log) {
  std::vector<NewtonRateRecord> records;
  const auto& d = log.residuals;
  for (std::size_t k = 0; k < d.size(); ++k) {
    NewtonRateRecord record{static_cast<int>(k), d[k], std::nullopt};
    if (k > 0 && k + 1 < d.size() && d[k - 1] > 0.0 && d[k] > 0.0 && d[k + 1] > 0.0 && d[k] != d[k - 1]) {
      record.eoc = std::log(d[k + 1] / d[k]) / std::log(d[k] / d[k - 1]);
    }
    records.push_back(record);
  }
  return records;
}

std::vector<NewtonRateRecord> newton_rate_table(const ProblemSpec& spec, const StudyOptions& options) {
  OptimalControlProblem problem(spec);
  problem.set_linear_settings(options.linear);
  return newton_rate_table(problem.solve(options.tol, options.maxit).log);
}

double max_point_mismatch(const ProblemSpec& spec, const OptimalControlSolution& solution) {
  double worst = 0.0;
  for (const auto& omega : spec.points) {
    worst = std::max(worst, std::abs(evaluate(solution.y, omega.location) - omega.target));
  }
  return worst;
}

std::vector<NuSweepRecord> nu_sweep(const std::function<ProblemSpec(double nu)>& builder,
                                    const std::vector<double>& nus, const StudyOptions& options) {
  std::vector<NuSweepRecord> records;
  for (double nu : nus) {
    if (!(nu > 0.0)) throw InvalidProblem("nu must be positive");
    ProblemSpec spec = builder(nu);
    OptimalControlProblem problem(spec);
    problem.set_linear_settings(options.linear);
    const auto solution = problem.solve(options.tol, options.maxit);
    const Mesh& mesh = spec.mesh();
    NuSweepRecord record;
    record.nu = nu;
    record.max_mismatch = max_point_mismatch(spec, solution);
    record.control_norm = l2_norm(mesh, solution.control_function(), gauss_rule(mesh.dim(), options.error_degree));
    record.newton_iterations = solution.log.iterations();
    records.push_back(record);
  }
  return records;
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << "h,dofs,error,eoc\n";
  for (const auto& r : records) {
    out << format_number(r.h) << ',' << r.dofs << ',' << format_number(r.error) << ','
        << (r.eoc ? format_number(*r.eoc) : "") << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << pad("h", 20) << pad("#DoFs", 10) << pad("|u-u_h|_L2", 20) << pad("EOC_h", 20) << '\n';
  for (const auto& r : records) {
    out << pad(format_number(r.h), 20) << pad(std::to_string(r.dofs), 10) << pad(format_number(r.error), 20)
        << pad(r.eoc ? format_number(*r.eoc) : "-", 20) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<NewtonRateRecord>& records) {
  out << "k,delta,eoc\n";
  for (const auto& r : records) {
    out << r.k << ',' << format_number(r.delta) << ',' << (r.eoc ? format_number(*r.eoc) : "") << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<NewtonRateRecord>& records) {
  out << pad("k", 4) << pad("delta_k", 20) << pad("EOC_k", 20) << '\n';
  for (const auto& r : records) {
    out << pad(std::to_string(r.k), 4) << pad(format_number(r.delta), 20)
        << pad(r.eoc ? format_number(*r.eoc) : "-", 20) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<NuSweepRecord>& records) {
  out << "nu,max_mismatch,control_norm,iterations\n";
  for (const auto& r : records) {
    out << format_number(r.nu) << ',' << format_number(r.max_mismatch) << ',' << format_number(r.control_norm)
        << ',' << r.newton_iterations << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<NuSweepRecord>& records) {
  out << pad("nu", 20) << pad("max|y_h(w)-g_w|", 20) << pad("|u_h|_L2", 20) << pad("#its", 6) << '\n';
  for (const auto& r : records) {
    out << pad(format_number(r.nu), 20) << pad(format_number(r.max_mismatch), 20)
        << pad(format_number(r.control_norm), 20) << pad(std::to_string(r.newton_iterations), 6) << '\n';
  }
}

}  // namespace pointctl

#include "pointctl/optctl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pointctl {

namespace {

// Generalised derivative of max(0, x): 1 for x >= 0.
double max_prime(double x) { return x >= 0.0 ? 1.0 : 0.0; }

bool on_mesh_boundary(const Mesh& mesh, const PointLocation& location) {
  const int c = location.cell_index;
  for (int i = 0; i <= mesh.dim(); ++i) {
    if (location.barycentric[i] <= 1e-12 && mesh.neighbour(c, i) < 0) return true;
  }
  return false;
}

}  // namespace

double project_box(double v, double a, double b) {
  return v + std::max(0.0, a - v) - std::max(0.0, v - b);
}

void validate(const ProblemSpec& spec) {
  if (!spec.dofs) throw InvalidProblem("problem has no mesh");
  if (!(spec.nu > 0.0) || !std::isfinite(spec.nu)) throw InvalidProblem("nu must be positive and finite");
  if (std::isnan(spec.lower) || std::isnan(spec.upper) || !(spec.lower < spec.upper)) {
    throw InvalidProblem("control bounds must satisfy lower < upper");
  }
  if (spec.lower == kInfinity || spec.upper == -kInfinity) {
    throw InvalidProblem("control bounds must admit a finite control");
  }
  if (spec.points.empty()) throw InvalidProblem("at least one observation point is required");
  const Mesh& mesh = spec.mesh();
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    const auto& omega = spec.points[i];
    if (!std::isfinite(omega.target)) throw InvalidProblem("observation targets must be finite");
    PointLocation location;
    try {
      location = locate_point(mesh, omega.location);
    } catch (const PointOutsideMesh&) {
      throw InvalidProblem("observation point " + std::to_string(i) + " lies outside the mesh");
    }
    if (on_mesh_boundary(mesh, location)) {
      throw InvalidProblem("observation point " + std::to_string(i) + " is not strictly interior");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& other = spec.points[j].location;
      const double d = std::hypot(omega.location[0] - other[0], omega.location[1] - other[1],
                                  omega.location[2] - other[2]);
      if (d <= 1e-14) throw InvalidProblem("observation points must be pairwise distinct");
    }
  }
}

double OptimalControlSolution::control(int cell, const Barycentric& lambda) const {
  return project_box(-p.value_in_cell(cell, lambda) / nu, lower, upper);
}

double OptimalControlSolution::control_at(const Point& x) const {
  return project_box(-evaluate(p, x) / nu, lower, upper);
}

CellFunction OptimalControlSolution::control_function() const {
  return [p = p, nu = nu, a = lower, b = upper](int cell, const Barycentric& lambda, const Point&) {
    return project_box(-p.value_in_cell(cell, lambda) / nu, a, b);
  };
}

Vector OptimalControlSolution::control_vertex_values() const {
  Vector values = p.vertex_values();
  for (double& v : values) v = project_box(-v / nu, lower, upper);
  return values;
}

OptimalControlProblem::OptimalControlProblem(ProblemSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  const Mesh& mesh = spec_.mesh();
  rule_ = gauss_rule(mesh.dim(), spec_.quad_degree);
  check_ellipticity(mesh, spec_.coeffs, rule_);
  stiffness_ = assemble_stiffness(*spec_.dofs, spec_.coeffs, &rule_);
  mass_ = assemble_mass(*spec_.dofs);
  if (spec_.coeffs.is_laplacian()) {
    laplacian_ = &stiffness_;
  } else {
    laplacian_storage_ = std::make_unique<SparseMatrix>(assemble_stiffness(*spec_.dofs));
    laplacian_ = laplacian_storage_.get();
  }
  forcing_load_ = spec_.forcing ? assemble_load(*spec_.dofs, spec_.forcing, rule_) : Vector(dofs().size(), 0.0);
  cell_dets_.resize(mesh.num_cells());
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    cell_dets_[c] = std::abs(reference_map(mesh, c).jacobian_det);
  }
  for (const auto& omega : spec_.points) stencils_.push_back(stencil(omega.location));
  set_direct_blocks(true);
}

void OptimalControlProblem::set_direct_blocks(bool enabled) {
  direct_blocks_ = enabled;
  if (!enabled || dofs().size() == 0 || stiffness_factor_) return;
  stiffness_factor_ = std::make_shared<SparseCholesky>(stiffness_);
  laplacian_factor_ = laplacian_ == &stiffness_ ? stiffness_factor_ : std::make_shared<SparseCholesky>(*laplacian_);
}

OptimalControlProblem::PointStencil OptimalControlProblem::stencil(const Point& omega) const {
  const auto location = locate_point(spec_.mesh(), omega);
  const auto vertices = spec_.mesh().cell(location.cell_index);
  PointStencil s;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int d = dofs().dof(vertices[i]);
    if (d >= 0 && location.barycentric[i] != 0.0) {
      s.dofs.push_back(d);
      s.weights.push_back(location.barycentric[i]);
    }
  }
  return s;
}

Vector OptimalControlProblem::solve_linear(const SparseMatrix& matrix, std::span<const double> rhs) const {
  if (direct_blocks_ && dofs().size() > 0) {
    if (&matrix == &stiffness_) return stiffness_factor_->solve(rhs);
    if (&matrix == laplacian_) return laplacian_factor_->solve(rhs);
  }
  return bicgstab(matrix, rhs, linear_).solution;
}

SolverResult OptimalControlProblem::solve_newton_system(const BlockSystem& system) const {
  if (!direct_blocks_ || dofs().size() == 0) return bicgstab(system, spec_.nu, linear_);
  // P = [[A, C/nu], [0, A]] differs from the Newton matrix by the point block,
  // whose rank is at most the number of observation points.
  const int n = dofs().size();
  const double nu = spec_.nu;
  const SparseMatrix& coupling = system.coupling_topright;
  const PreconditionerFn block_upper = [this, n, nu, &coupling](std::span<const double> in, std::span<double> out) {
    const auto top_in = in.subspan(0, n);
    const auto top_out = out.subspan(0, n);
    const auto bottom_out = out.subspan(n, n);
    stiffness_factor_->solve(in.subspan(n, n), bottom_out);
    Vector t(n);
    coupling.multiply(bottom_out, t);
    for (int i = 0; i < n; ++i) t[i] = top_in[i] - t[i] / nu;
    stiffness_factor_->solve(t, top_out);
  };
  SolverSettings settings = linear_;
  if (settings.max_iterations <= 0) settings.max_iterations = 200 + 4 * static_cast<int>(stencils_.size());
  return bicgstab(system.monolithic(nu), system.rhs(), block_upper, settings);
}

Vector OptimalControlProblem::control_load(const CellFunction& eta) const {
  const Mesh& mesh = spec_.mesh();
  const int nloc = mesh.dim() + 1;
  Vector load(dofs().size(), 0.0);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const auto v = mesh.cell(c);
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const auto& lambda = rule_.points[q];
      const double value = eta(c, lambda, mesh.map_to_physical(c, lambda)) * rule_.weights[q] * cell_dets_[c];
      for (int i = 0; i < nloc; ++i) {
        const int d = dofs().dof(v[i]);
        if (d >= 0) load[d] += value * lambda[i];
      }
    }
  }
  return load;
}

FeFunction OptimalControlProblem::solve_state(const CellFunction& eta) const {
  Vector rhs = control_load(eta);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += forcing_load_[i];
  return FeFunction(spec_.dofs, solve_linear(stiffness_, rhs));
}

double OptimalControlProblem::observe(const FeFunction& y, std::size_t i) const {
  const auto& s = stencils_.at(i);
  double value = 0.0;
  for (std::size_t k = 0; k < s.dofs.size(); ++k) value += s.weights[k] * y.coefficients[s.dofs[k]];
  return value;
}

FeFunction OptimalControlProblem::solve_adjoint(const FeFunction& y) const {
  Vector rhs(dofs().size(), 0.0);
  for (std::size_t i = 0; i < stencils_.size(); ++i) {
    const double mismatch = observe(y, i) - spec_.points[i].target;
    const auto& s = stencils_[i];
    for (std::size_t k = 0; k < s.dofs.size(); ++k) rhs[s.dofs[k]] += mismatch * s.weights[k];
  }
  // a(v, p) = <rhs, v> is the transposed system; A is symmetric for symmetric a_ij.
  return FeFunction(spec_.dofs, solve_linear(stiffness_, rhs));
}

FeFunction OptimalControlProblem::point_adjoint(const Point& omega) const {
  const Vector rhs = assemble_point_load(dofs(), omega, 1.0);
  return FeFunction(spec_.dofs, solve_linear(stiffness_, rhs));
}

ResidualPair OptimalControlProblem::residual(const FeFunction& y, const FeFunction& p) const {
  const Mesh& mesh = spec_.mesh();
  const int nloc = mesh.dim() + 1;
  const int n = dofs().size();
  ResidualPair r{Vector(n, 0.0), Vector(n, 0.0)};
  stiffness_.multiply(y.coefficients, r.r_state);
  stiffness_.multiply(p.coefficients, r.r_adjoint);
  for (int i = 0; i < n; ++i) r.r_state[i] -= forcing_load_[i];

  // Nonlinear control term Q(P(-p/nu) phi_z).
  std::array<int, 4> local_dofs{};
  std::array<double, 4> local_p{};
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      local_dofs[i] = dofs().dof(v[i]);
      local_p[i] = local_dofs[i] >= 0 ? p.coefficients[local_dofs[i]] : 0.0;
    }
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const auto& lambda = rule_.points[q];
      double pq = 0.0;
      for (int i = 0; i < nloc; ++i) pq += lambda[i] * local_p[i];
      const double value = control_value(pq) * rule_.weights[q] * cell_dets_[c];
      for (int i = 0; i < nloc; ++i) {
        if (local_dofs[i] >= 0) r.r_state[local_dofs[i]] -= value * lambda[i];
      }
    }
  }

  for (std::size_t i = 0; i < stencils_.size(); ++i) {
    const double mismatch = observe(y, i) - spec_.points[i].target;
    const auto& s = stencils_[i];
    for (std::size_t k = 0; k < s.dofs.size(); ++k) r.r_adjoint[s.dofs[k]] -= mismatch * s.weights[k];
  }
  return r;
}

double OptimalControlProblem::z_norm(std::span<const double> r) const {
  if (static_cast<int>(r.size()) != dofs().size()) throw DimensionMismatch("z_norm: wrong residual length");
  if (norm2(r) == 0.0) return 0.0;
  const Vector w = solve_linear(*laplacian_, r);
  const Vector lw = *laplacian_ * w;
  return std::sqrt(std::max(0.0, dot(w, lw)));
}

double OptimalControlProblem::z_norm(const ResidualPair& r) const {
  const double a = z_norm(r.r_state);
  const double b = z_norm(r.r_adjoint);
  return std::sqrt(a * a + b * b);
}

BlockSystem OptimalControlProblem::newton_jacobian(const FeFunction& p) const {
  const int n = dofs().size();
  BlockSystem system;
  system.stiffness = stiffness_;
  if (spec_.unconstrained()) {
    system.coupling_topright = mass_;
  } else {
    const double nu = spec_.nu;
    const double a = spec_.lower;
    const double b = spec_.upper;
    const CellFunction active = [&p, nu, a, b](int cell, const Barycentric& lambda, const Point&) {
      const double pv = p.value_in_cell(cell, lambda);
      return 1.0 - max_prime(a + pv / nu) - max_prime(-pv / nu - b);
    };
    system.coupling_topright = assemble_weighted_mass(dofs(), active, rule_);
  }
  std::vector<Triplet> triplets;
  for (const auto& s : stencils_) {
    for (std::size_t i = 0; i < s.dofs.size(); ++i) {
      for (std::size_t j = 0; j < s.dofs.size(); ++j) {
        triplets.push_back({s.dofs[i], s.dofs[j], s.weights[i] * s.weights[j]});
      }
    }
  }
  system.coupling_bottomleft = SparseMatrix::from_triplets(n, n, std::move(triplets));
  system.rhs_top.assign(n, 0.0);
  system.rhs_bottom.assign(n, 0.0);
  return system;
}

OptimalControlSolution OptimalControlProblem::solve(double tol, int maxit) const {
  const int n = dofs().size();
  OptimalControlSolution solution;
  solution.y = FeFunction(spec_.dofs);
  solution.p = FeFunction(spec_.dofs);
  solution.nu = spec_.nu;
  solution.lower = spec_.lower;
  solution.upper = spec_.upper;
  NewtonLog& log = solution.log;

  ResidualPair r = residual(solution.y, solution.p);
  log.residuals.push_back(z_norm(r));
  while (log.residuals.back() > tol) {
    if (log.iterations() >= maxit) {
      throw NoConvergence("semismooth Newton: no convergence after " + std::to_string(maxit) +
                              " iterations, residual " + std::to_string(log.residuals.back()),
                          log);
    }
    BlockSystem system = newton_jacobian(solution.p);
    for (int i = 0; i < n; ++i) {
      system.rhs_top[i] = -r.r_state[i];
      system.rhs_bottom[i] = -r.r_adjoint[i];
    }
    const SolverResult step = solve_newton_system(system);
    log.linear_iterations.push_back(step.report.iterations);
    for (int i = 0; i < n; ++i) {
      solution.y.coefficients[i] += step.solution[i];
      solution.p.coefficients[i] += step.solution[n + i];
    }
    r = residual(solution.y, solution.p);
    log.residuals.push_back(z_norm(r));
  }
  log.converged = true;
  return solution;
}

double OptimalControlProblem::objective(const CellFunction& eta) const {
  const FeFunction y = solve_state(eta);
  double fidelity = 0.0;
  for (std::size_t i = 0; i < stencils_.size(); ++i) {
    const double mismatch = observe(y, i) - spec_.points[i].target;
    fidelity += mismatch * mismatch;
  }
  const Mesh& mesh = spec_.mesh();
  double norm_sq = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const auto& lambda = rule_.points[q];
      const double value = eta(c, lambda, mesh.map_to_physical(c, lambda));
      norm_sq += rule_.weights[q] * cell_dets_[c] * value * value;
    }
  }
  return 0.5 * fidelity + 0.5 * spec_.nu * norm_sq;
}

OptimalControlSolution solve(const ProblemSpec& spec, double tol, int maxit) {
  return OptimalControlProblem(spec).solve(tol, maxit);
}

}  // namespace pointctl

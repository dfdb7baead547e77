#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "pointctl/assembly.hpp"
#include "pointctl/errors.hpp"
#include "pointctl/sparse.hpp"

namespace pointctl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Default relative tolerance of the linear solves inside Newton. The rounding
/// floor of |b - Ax| / |b| grows like 1/h^2 for loads of size h^2.
inline constexpr double kLinearTolerance = 1e-10;

struct ObservationPoint {
  Point location{};
  double target = 0.0;
};

/// Data of the point-fidelity control problem
///   min 1/2 sum_w (y(w) - g_w)^2 + nu/2 |u|^2,  A y = u + f,  lower <= u <= upper.
struct ProblemSpec {
  std::shared_ptr<const DofMap> dofs;
  CoefficientField coeffs;
  ScalarField forcing;  // empty means f = 0
  double nu = 1.0;
  double lower = -kInfinity;
  double upper = kInfinity;
  std::vector<ObservationPoint> points;
  /// Degree of the rule Q used for loads and the nonlinear control term.
  int quad_degree = 5;

  const Mesh& mesh() const { return dofs->mesh(); }
  bool unconstrained() const { return lower == -kInfinity && upper == kInfinity; }
};

/// Throws InvalidProblem naming the violated invariant.
void validate(const ProblemSpec& spec);

/// v + max(0, a - v) - max(0, v - b).
double project_box(double v, double a, double b);

struct ResidualPair {
  Vector r_state;
  Vector r_adjoint;
};

struct NewtonLog {
  /// Z-norm residuals delta_0 (initial iterate) .. delta_K.
  std::vector<double> residuals;
  /// BiCGStab iterations of each Newton step.
  std::vector<int> linear_iterations;
  bool converged = false;

  int iterations() const { return residuals.empty() ? 0 : static_cast<int>(residuals.size()) - 1; }
};

class NoConvergence : public SolverError {
 public:
  NoConvergence(const std::string& what, NewtonLog log) : SolverError(what), log_(std::move(log)) {}
  const NewtonLog& log() const { return log_; }

 private:
  NewtonLog log_;
};

struct OptimalControlSolution {
  FeFunction y;
  FeFunction p;
  double nu = 1.0;
  double lower = -kInfinity;
  double upper = kInfinity;
  NewtonLog log;

  /// u_h = P_[a,b](-p_h / nu) at a point of a cell.
  double control(int cell, const Barycentric& lambda) const;
  /// u_h at an arbitrary point; zero outside the mesh.
  double control_at(const Point& x) const;
  CellFunction control_function() const;
  /// u_h sampled at the mesh vertices (not a P1 function when a bound is active).
  Vector control_vertex_values() const;
};

/// Discrete operators of one ProblemSpec, assembled once.
class OptimalControlProblem {
 public:
  explicit OptimalControlProblem(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  const DofMap& dofs() const { return *spec_.dofs; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& laplacian() const { return *laplacian_; }
  const SparseMatrix& mass() const { return mass_; }
  const QuadratureRule& rule() const { return rule_; }
  const SolverSettings& linear_settings() const { return linear_; }
  void set_linear_settings(const SolverSettings& settings) { linear_ = settings; }
  /// With direct blocks (the default), stiffness solves use a sparse
  /// factorisation and the Newton system is preconditioned by its block upper
  /// triangle. Otherwise every solve is BiCGStab with the configured
  /// preconditioner applied to the full matrix.
  bool direct_blocks() const { return direct_blocks_; }
  void set_direct_blocks(bool enabled);

  /// Q(eta phi_z) for a control evaluated at the quadrature points.
  Vector control_load(const CellFunction& eta) const;

  /// y_h with a(y_h, v) = (eta + f, v)_Q.
  FeFunction solve_state(const CellFunction& eta) const;
  /// p_h with a(v, p_h) = sum_w (y(w) - g_w) v(w).
  FeFunction solve_adjoint(const FeFunction& y) const;
  /// p_h with a(v, p_h) = v(w): the discrete adjoint of point evaluation.
  FeFunction point_adjoint(const Point& omega) const;
  /// Value of y at the observation point with index i.
  double observe(const FeFunction& y, std::size_t i) const;

  ResidualPair residual(const FeFunction& y, const FeFunction& p) const;
  /// sqrt(w^T L w) with L w = r and L the Laplacian stiffness matrix.
  double z_norm(std::span<const double> r) const;
  double z_norm(const ResidualPair& r) const;

  /// Generalised derivative of the residual at p (independent of y).
  BlockSystem newton_jacobian(const FeFunction& p) const;

  /// Semismooth Newton from (0, 0). Throws NoConvergence after maxit steps.
  OptimalControlSolution solve(double tol = 1e-8, int maxit = 30) const;

  /// Reduced cost 1/2 sum (S eta(w) - g_w)^2 + nu/2 |eta|^2_Q.
  double objective(const CellFunction& eta) const;

 private:
  struct PointStencil {
    std::vector<int> dofs;
    std::vector<double> weights;
  };

  PointStencil stencil(const Point& omega) const;
  Vector solve_linear(const SparseMatrix& matrix, std::span<const double> rhs) const;
  SolverResult solve_newton_system(const BlockSystem& system) const;
  double control_value(double p) const { return project_box(-p / spec_.nu, spec_.lower, spec_.upper); }

  ProblemSpec spec_;
  QuadratureRule rule_;
  SparseMatrix stiffness_;
  SparseMatrix mass_;
  std::unique_ptr<SparseMatrix> laplacian_storage_;
  const SparseMatrix* laplacian_ = nullptr;
  Vector forcing_load_;
  std::vector<double> cell_dets_;
  std::vector<PointStencil> stencils_;
  std::shared_ptr<const SparseCholesky> stiffness_factor_;
  std::shared_ptr<const SparseCholesky> laplacian_factor_;
  SolverSettings linear_{Preconditioner::ILU0, kLinearTolerance, 0};
  bool direct_blocks_ = true;
};

/// Convenience wrapper around OptimalControlProblem::solve.
OptimalControlSolution solve(const ProblemSpec& spec, double tol = 1e-8, int maxit = 30);

}  // namespace pointctl

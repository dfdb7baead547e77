#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pointctl/optctl.hpp"

namespace pointctl {

/// A sequence of problems on uniformly refined meshes, indexed by level.
struct ProblemFamily {
  std::string name;
  std::function<ProblemSpec(int level)> spec;
  /// Nominal mesh size of a level; halves with every refinement.
  std::function<double(int level)> h;
};

/// Unconstrained problem with a closed-form solution.
struct ExactBenchmark {
  ProblemFamily family;
  ScalarField exact_u;
  ScalarField exact_p;
  ScalarField exact_y;
  ScalarField forcing;
  double nu = 1.0;
};

/// Unit disk, one observation point at the origin with target 0, nu = 1:
/// u = log|x| / (2 pi), y = cos(pi |x| / 2).
ExactBenchmark benchmark_2d();

/// Unit ball, one observation point at the origin with target 0, nu = 1:
/// u = -(1/|x| - 1) / (4 pi), y = cos(pi |x| / 2).
ExactBenchmark benchmark_3d();

/// Unit square with n = 4 * 2^level cells per side, f = 0, nu = 1e-2,
/// -10 <= u <= 10, targets 1, 0, -1 at (0.2,0.5), (0.5,0.5), (0.8,0.5).
ProblemSpec constrained_2d(int level);
ProblemFamily constrained_2d_family();

/// Unit square with n cells per side, targets 1 at five points, no bounds.
ProblemSpec five_point_2d(int n, double nu);

struct StudyOptions {
  double tol = 1e-8;
  int maxit = 30;
  int error_degree = 10;
  SolverSettings linear{Preconditioner::ILU0, kLinearTolerance, 0};
};

struct ConvergenceRecord {
  double h = 0.0;
  long dofs = 0;  // vertex count, boundary included
  double error = 0.0;
  std::optional<double> eoc;
  int newton_iterations = 0;
};

/// log(e_prev / e) / log(h_prev / h) for consecutive rows.
void fill_eoc(std::vector<ConvergenceRecord>& records);

/// Errors |u - u_h| in L2(Omega_h) on levels 0 .. levels-1.
std::vector<ConvergenceRecord> eoc_study(const ExactBenchmark& benchmark, int levels,
                                         const StudyOptions& options = {});

/// Errors |u_fine - u_h| on levels 0 .. levels-1 against the solution on
/// `fine_level` (levels + 1 when negative), integrated on the fine mesh.
std::vector<ConvergenceRecord> approx_eoc_study(const ProblemFamily& family, int levels, int fine_level = -1,
                                                const StudyOptions& options = {});

/// L2 distance between the controls of two solutions, integrated over the mesh
/// of `fine`; the mesh of `coarse` must be nested in it or cover it.
double control_distance(const OptimalControlSolution& fine, const OptimalControlSolution& coarse,
                        int degree = 10);

struct NewtonRateRecord {
  int k = 0;
  double delta = 0.0;
  std::optional<double> eoc;
};

/// delta_k and EOC_k = log(delta_{k+1}/delta_k) / log(delta_k/delta_{k-1}).
std::vector<NewtonRateRecord> newton_rate_table(const ProblemSpec& spec, const StudyOptions& options = {});
std::vector<NewtonRateRecord> newton_rate_table(const NewtonLog& log);

struct NuSweepRecord {
  double nu = 0.0;
  double max_mismatch = 0.0;
  double control_norm = 0.0;
  int newton_iterations = 0;
};

std::vector<NuSweepRecord> nu_sweep(const std::function<ProblemSpec(double nu)>& builder,
                                    const std::vector<double>& nus, const StudyOptions& options = {});

/// Max over observation points of |y_h(w) - g_w|.
double max_point_mismatch(const ProblemSpec& spec, const OptimalControlSolution& solution);

/// Numbers printed with 12 significant digits.
std::string format_number(double value);

void write_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_table(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_csv(std::ostream& out, const std::vector<NewtonRateRecord>& records);
void write_table(std::ostream& out, const std::vector<NewtonRateRecord>& records);
void write_csv(std::ostream& out, const std::vector<NuSweepRecord>& records);
void write_table(std::ostream& out, const std::vector<NuSweepRecord>& records);

}  // namespace pointctl

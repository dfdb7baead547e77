#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pointctl {

using Vector = std::vector<double>;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row real matrix. Column indices are strictly increasing within
/// each row and there are no duplicate entries.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  /// Duplicate (row, col) pairs are summed.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  double coeff(int i, int j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  SparseMatrix transposed() const;
  SparseMatrix scaled(double factor) const;
  /// Row-major dense copy.
  std::vector<double> to_dense() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;

  friend SparseMatrix add(const SparseMatrix&, const SparseMatrix&, double, double);
};

/// alpha * a + beta * b.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);

/// Stacks [[top_left, top_right], [bottom_left, bottom_right]] into one matrix.
SparseMatrix stack_blocks(const SparseMatrix& top_left, const SparseMatrix& top_right,
                          const SparseMatrix& bottom_left, const SparseMatrix& bottom_right);

/// The 2x2 system
///   [ A        (1/nu) C ] [y]   [rhs_top   ]
///   [ -P       A        ] [p] = [rhs_bottom]
/// with C = M or M_c and P = sum of point matrices. Blocks are stored
/// unscaled; nu is applied when the monolithic matrix is formed.
struct BlockSystem {
  SparseMatrix stiffness;
  SparseMatrix coupling_topright;
  SparseMatrix coupling_bottomleft;
  Vector rhs_top;
  Vector rhs_bottom;

  int block_size() const { return stiffness.rows(); }
  SparseMatrix monolithic(double nu) const;
  Vector rhs() const;
};

/// Validates the block shapes; throws DimensionMismatch.
BlockSystem assemble_block(SparseMatrix stiffness, SparseMatrix coupling_topright,
                           SparseMatrix point_sum, Vector rhs_top, Vector rhs_bottom);

enum class Preconditioner { None, ILU0, GaussSeidel };

std::string to_string(Preconditioner p);

struct SolverReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

struct SolverResult {
  Vector solution;
  SolverReport report;
};

struct SolverSettings {
  Preconditioner preconditioner = Preconditioner::ILU0;
  double tolerance = 1e-12;
  /// Non-positive means 10 * n.
  int max_iterations = 0;
};

/// Incomplete LU factorisation with the sparsity pattern of the matrix.
class Ilu0 {
 public:
  /// Throws SingularMatrix on a zero pivot.
  explicit Ilu0(const SparseMatrix& matrix);
  void apply(std::span<const double> rhs, std::span<double> out) const;

 private:
  std::vector<int> offsets_;
  std::vector<int> cols_;
  std::vector<double> values_;
  std::vector<int> diagonal_;
};

/// Sparse LDL^T factorisation (fill-reducing ordering) of a symmetric matrix.
class SparseCholesky {
 public:
  /// Throws SingularMatrix if the factorisation fails.
  explicit SparseCholesky(const SparseMatrix& matrix);
  ~SparseCholesky();
  SparseCholesky(SparseCholesky&&) noexcept;
  SparseCholesky& operator=(SparseCholesky&&) noexcept;

  int size() const;
  void solve(std::span<const double> rhs, std::span<double> out) const;
  Vector solve(std::span<const double> rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// out = M^{-1} in for some approximation M of the system matrix.
using PreconditionerFn = std::function<void(std::span<const double> in, std::span<double> out)>;

/// Right-preconditioned BiCGStab. Convergence is declared on the true relative
/// residual |b - Ax| / |b|. Throws Breakdown or MaxIterations.
SolverResult bicgstab(const SparseMatrix& matrix, std::span<const double> rhs,
                      const SolverSettings& settings = {});

/// Same, with a prebuilt ILU(0) factorisation of `matrix` as preconditioner.
SolverResult bicgstab(const SparseMatrix& matrix, std::span<const double> rhs, const Ilu0& preconditioner,
                      const SolverSettings& settings = {});

/// Same, with an arbitrary right preconditioner.
SolverResult bicgstab(const SparseMatrix& matrix, std::span<const double> rhs, const PreconditionerFn& preconditioner,
                      const SolverSettings& settings = {});

/// Solves the monolithic form of a block system.
SolverResult bicgstab(const BlockSystem& system, double nu, const SolverSettings& settings = {});

/// Gaussian elimination with partial pivoting on a row-major dense matrix.
/// Throws SingularMatrix, or DimensionMismatch above 5000 unknowns.
Vector dense_solve_oracle(std::vector<double> matrix, Vector rhs);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs_difference(std::span<const double> a, std::span<const double> b);

/// MatrixMarket coordinate real general format.
void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);

}  // namespace pointctl

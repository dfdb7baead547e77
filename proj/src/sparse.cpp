#include "pointctl/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "pointctl/errors.hpp"

namespace pointctl {

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), row_offsets_(static_cast<std::size_t>(rows) + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  SparseMatrix m(rows, cols);
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw DimensionMismatch("triplet index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      sum += triplets[j].value;
      ++j;
    }
    m.col_indices_.push_back(triplets[i].col);
    m.values_.push_back(sum);
    ++m.row_offsets_[triplets[i].row + 1];
    i = j;
  }
  for (int r = 0; r < rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::coeff(int i, int j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[it - col_indices_.begin()];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_) {
    throw DimensionMismatch("matrix-vector product with mismatched sizes");
  }
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) sum += values_[k] * x[col_indices_[k]];
    y[r] = sum;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(rows_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) t.push_back({col_indices_[k], r, values_[k]});
  }
  return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  SparseMatrix m = *this;
  for (auto& v : m.values_) v *= factor;
  return m;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(static_cast<std::size_t>(rows_) * cols_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      dense[static_cast<std::size_t>(r) * cols_ + col_indices_[k]] = values_[k];
    }
  }
  return dense;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("add: shapes differ");
  std::vector<Triplet> t;
  t.reserve(a.nonzeros() + b.nonzeros());
  for (int r = 0; r < a.rows(); ++r) {
    for (int k = a.row_offsets_[r]; k < a.row_offsets_[r + 1]; ++k) {
      t.push_back({r, a.col_indices_[k], alpha * a.values_[k]});
    }
    for (int k = b.row_offsets_[r]; k < b.row_offsets_[r + 1]; ++k) {
      t.push_back({r, b.col_indices_[k], beta * b.values_[k]});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseMatrix stack_blocks(const SparseMatrix& top_left, const SparseMatrix& top_right,
                          const SparseMatrix& bottom_left, const SparseMatrix& bottom_right) {
  const int n = top_left.rows();
  const int m = top_left.cols();
  if (top_right.rows() != n || bottom_left.cols() != m || bottom_right.rows() != bottom_left.rows() ||
      bottom_right.cols() != top_right.cols()) {
    throw DimensionMismatch("stack_blocks: inconsistent block shapes");
  }
  std::vector<Triplet> t;
  t.reserve(top_left.nonzeros() + top_right.nonzeros() + bottom_left.nonzeros() +
            bottom_right.nonzeros());
  auto append = [&t](const SparseMatrix& block, int row0, int col0) {
    const auto offsets = block.row_offsets();
    const auto cols = block.col_indices();
    const auto vals = block.values();
    for (int r = 0; r < block.rows(); ++r) {
      for (int k = offsets[r]; k < offsets[r + 1]; ++k) t.push_back({row0 + r, col0 + cols[k], vals[k]});
    }
  };
  append(top_left, 0, 0);
  append(top_right, 0, m);
  append(bottom_left, n, 0);
  append(bottom_right, n, m);
  return SparseMatrix::from_triplets(n + bottom_left.rows(), m + top_right.cols(), std::move(t));
}

SparseMatrix BlockSystem::monolithic(double nu) const {
  return stack_blocks(stiffness, coupling_topright.scaled(1.0 / nu), coupling_bottomleft.scaled(-1.0),
                      stiffness);
}

Vector BlockSystem::rhs() const {
  Vector b(rhs_top);
  b.insert(b.end(), rhs_bottom.begin(), rhs_bottom.end());
  return b;
}

BlockSystem assemble_block(SparseMatrix stiffness, SparseMatrix coupling_topright,
                           SparseMatrix point_sum, Vector rhs_top, Vector rhs_bottom) {
  const int n = stiffness.rows();
  auto square_of = [n](const SparseMatrix& m) { return m.rows() == n && m.cols() == n; };
  if (!square_of(stiffness)) throw DimensionMismatch("stiffness block is not square");
  if (!square_of(coupling_topright)) throw DimensionMismatch("top-right block has the wrong shape");
  if (!square_of(point_sum)) throw DimensionMismatch("bottom-left block has the wrong shape");
  if (static_cast<int>(rhs_top.size()) != n || static_cast<int>(rhs_bottom.size()) != n) {
    throw DimensionMismatch("right-hand side blocks have the wrong length");
  }
  return {std::move(stiffness), std::move(coupling_topright), std::move(point_sum), std::move(rhs_top),
          std::move(rhs_bottom)};
}

std::string to_string(Preconditioner p) {
  switch (p) {
    case Preconditioner::None:
      return "none";
    case Preconditioner::ILU0:
      return "ilu0";
    case Preconditioner::GaussSeidel:
      return "gauss-seidel";
  }
  return "unknown";
}

Ilu0::Ilu0(const SparseMatrix& matrix)
    : offsets_(matrix.row_offsets().begin(), matrix.row_offsets().end()),
      cols_(matrix.col_indices().begin(), matrix.col_indices().end()),
      values_(matrix.values().begin(), matrix.values().end()),
      diagonal_(matrix.rows(), -1) {
  const int n = matrix.rows();
  for (int r = 0; r < n; ++r) {
    for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      if (cols_[k] == r) diagonal_[r] = k;
    }
    if (diagonal_[r] < 0) throw SingularMatrix("ILU0: missing diagonal entry in row " + std::to_string(r));
  }
  std::vector<int> position(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) position[cols_[k]] = k;
    for (int k = offsets_[i]; k < offsets_[i + 1] && cols_[k] < i; ++k) {
      const int row_k = cols_[k];
      values_[k] /= values_[diagonal_[row_k]];
      const double lik = values_[k];
      for (int j = diagonal_[row_k] + 1; j < offsets_[row_k + 1]; ++j) {
        const int p = position[cols_[j]];
        if (p >= 0) values_[p] -= lik * values_[j];
      }
    }
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) position[cols_[k]] = -1;
    if (values_[diagonal_[i]] == 0.0 || !std::isfinite(values_[diagonal_[i]])) {
      throw SingularMatrix("ILU0: zero pivot in row " + std::to_string(i));
    }
  }
}

void Ilu0::apply(std::span<const double> rhs, std::span<double> out) const {
  const int n = static_cast<int>(diagonal_.size());
  for (int i = 0; i < n; ++i) {
    double sum = rhs[i];
    for (int k = offsets_[i]; k < diagonal_[i]; ++k) sum -= values_[k] * out[cols_[k]];
    out[i] = sum;
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = out[i];
    for (int k = diagonal_[i] + 1; k < offsets_[i + 1]; ++k) sum -= values_[k] * out[cols_[k]];
    out[i] = sum / values_[diagonal_[i]];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace {

SolverResult bicgstab_impl(const SparseMatrix& matrix, std::span<const double> rhs,
                           const SolverSettings& settings, const PreconditionerFn* external) {
  const int n = matrix.rows();
  if (matrix.cols() != n || static_cast<int>(rhs.size()) != n) {
    throw DimensionMismatch("bicgstab: system is not square or rhs has the wrong length");
  }
  if (!(settings.tolerance > 0.0)) throw SolverError("bicgstab: tolerance must be positive");
  const int max_iterations = settings.max_iterations > 0 ? settings.max_iterations : 10 * std::max(n, 1);

  SolverResult result;
  result.solution.assign(n, 0.0);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    result.report = {0, 0.0, true};
    return result;
  }

  PreconditionerFn precondition;
  std::unique_ptr<Ilu0> ilu;
  if (external != nullptr) {
    precondition = *external;
  } else {
    switch (settings.preconditioner) {
      case Preconditioner::None:
        precondition = [](std::span<const double> in, std::span<double> out) {
          std::copy(in.begin(), in.end(), out.begin());
        };
        break;
      case Preconditioner::ILU0:
        ilu = std::make_unique<Ilu0>(matrix);
        precondition = [&ilu](std::span<const double> in, std::span<double> out) { ilu->apply(in, out); };
        break;
      case Preconditioner::GaussSeidel:
        precondition = [&matrix, n](std::span<const double> in, std::span<double> out) {
          const auto offsets = matrix.row_offsets();
          const auto cols = matrix.col_indices();
          const auto vals = matrix.values();
          for (int i = 0; i < n; ++i) {
            double sum = in[i];
            double diag = 0.0;
            for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
              if (cols[k] < i) {
                sum -= vals[k] * out[cols[k]];
              } else if (cols[k] == i) {
                diag = vals[k];
              }
            }
            if (diag == 0.0) throw SingularMatrix("Gauss-Seidel: zero diagonal");
            out[i] = sum / diag;
          }
        };
        break;
    }
  }

  Vector& x = result.solution;
  Vector r(rhs.begin(), rhs.end());
  Vector r_hat = r;
  Vector p(n, 0.0), v(n, 0.0), s(n), t(n), p_hat(n), s_hat(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  bool fresh = true;
  int iteration = 0;

  auto true_residual = [&]() {
    matrix.multiply(x, t);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - t[i];
    return norm2(r) / bnorm;
  };
  auto restart = [&]() {
    r_hat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    rho = alpha = omega = 1.0;
    fresh = true;
  };

  while (iteration < max_iterations) {
    const double rho_new = dot(r_hat, r);
    if (std::abs(rho_new) <= 1e-30 * norm2(r_hat) * norm2(r)) {
      if (fresh) throw Breakdown("bicgstab: rho vanished after restart");
      true_residual();
      restart();
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precondition(p, p_hat);
    matrix.multiply(p_hat, v);
    const double rv = dot(r_hat, v);
    if (rv == 0.0) {
      if (fresh) throw Breakdown("bicgstab: (r_hat, v) vanished after restart");
      true_residual();
      restart();
      continue;
    }
    alpha = rho / rv;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ++iteration;
    fresh = false;
    if (norm2(s) / bnorm <= settings.tolerance) {
      for (int i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
      const double res = true_residual();
      if (res <= settings.tolerance) {
        result.report = {iteration, res, true};
        return result;
      }
      restart();
      continue;
    }
    precondition(s, s_hat);
    matrix.multiply(s_hat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (int i = 0; i < n; ++i) x[i] += alpha * p_hat[i] + omega * s_hat[i];
    for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    if (omega == 0.0) {
      true_residual();
      restart();
      continue;
    }
    if (norm2(r) / bnorm <= settings.tolerance) {
      const double res = true_residual();
      if (res <= settings.tolerance) {
        result.report = {iteration, res, true};
        return result;
      }
      restart();
    }
  }
  const double res = true_residual();
  throw MaxIterations("bicgstab: no convergence after " + std::to_string(iteration) +
                      " iterations, relative residual " + std::to_string(res));
}

}  // namespace

SolverResult bicgstab(const SparseMatrix& matrix, std::span<const double> rhs,
                      const SolverSettings& settings) {
  return bicgstab_impl(matrix, rhs, settings, nullptr);
}

SolverResult bicgstab(const SparseMatrix& matrix, std::span<const double> rhs, const Ilu0& preconditioner,
                      const SolverSettings& settings) {
  const PreconditionerFn apply = [&preconditioner](std::span<const double> in, std::span<double> out) {
    preconditioner.apply(in, out);
  };
  return bicgstab_impl(matrix, rhs, settings, &apply);
}

SolverResult bicgstab(const SparseMatrix& matrix, std::span<const double> rhs, const PreconditionerFn& preconditioner,
                      const SolverSettings& settings) {
  return bicgstab_impl(matrix, rhs, settings, &preconditioner);
}

SolverResult bicgstab(const BlockSystem& system, double nu, const SolverSettings& settings) {
  const SparseMatrix matrix = system.monolithic(nu);
  const Vector b = system.rhs();
  return bicgstab(matrix, b, settings);
}

struct SparseCholesky::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> factor;
  int n = 0;
};

SparseCholesky::SparseCholesky(const SparseMatrix& matrix) : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols()) throw DimensionMismatch("SparseCholesky: matrix is not square");
  impl_->n = matrix.rows();
  const auto offsets = matrix.row_offsets();
  const auto cols = matrix.col_indices();
  const auto vals = matrix.values();
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
      matrix.rows(), matrix.cols(), static_cast<int>(vals.size()), offsets.data(), cols.data(), vals.data());
  const Eigen::SparseMatrix<double> a = view;
  impl_->factor.compute(a);
  if (impl_->factor.info() != Eigen::Success) throw SingularMatrix("SparseCholesky: factorisation failed");
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

int SparseCholesky::size() const { return impl_->n; }

void SparseCholesky::solve(std::span<const double> rhs, std::span<double> out) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::Map<Eigen::VectorXd> x(out.data(), static_cast<Eigen::Index>(out.size()));
  x = impl_->factor.solve(b);
}

Vector SparseCholesky::solve(std::span<const double> rhs) const {
  Vector out(rhs.size());
  solve(rhs, out);
  return out;
}

Vector dense_solve_oracle(std::vector<double> a, Vector b) {
  const std::size_t n = b.size();
  if (n > 5000) throw DimensionMismatch("dense oracle limited to 5000 unknowns");
  if (a.size() != n * n) throw DimensionMismatch("dense oracle: matrix is not n x n");
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[pivot * n + k])) pivot = i;
    }
    if (std::abs(a[pivot * n + k]) <= 1e-16 * scale) {
      throw SingularMatrix("dense oracle: matrix is singular");
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
      std::swap(b[k], b[pivot]);
    }
    const double inv = 1.0 / a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = a[i * n + k] * inv;
      if (factor == 0.0) continue;
      a[i * n + k] = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= factor * a[k * n + j];
      b[i] -= factor * b[k];
    }
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) sum -= a[ii * n + j] * x[j];
    x[ii] = sum / a[ii * n + ii];
  }
  return x;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonzeros() << '\n';
  out.precision(17);
  const auto offsets = matrix.row_offsets();
  const auto cols = matrix.col_indices();
  const auto vals = matrix.values();
  for (int r = 0; r < matrix.rows(); ++r) {
    for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
      out << r + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
    }
  }
}

}  // namespace pointctl

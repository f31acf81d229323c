#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "dbc/kernels.hpp"

namespace dbc {

using Vector = std::vector<double>;

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row. Immutable after construction.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Validates the structure; throws InvalidInput.
  CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::int64_t> row_offsets,
            std::vector<std::int32_t> col_indices, std::vector<double> values);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int32_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  /// Stored value at (r, c), zero if not stored.
  double at(std::size_t r, std::size_t c) const;
  Vector diagonal() const;
  double max_abs() const;
  /// |A_ij - A_ji| <= rel_tol * max|A| over all stored entries.
  bool is_symmetric(double rel_tol = 1e-14) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector multiply(std::span<const double> x) const;
  /// y = A^T x
  Vector multiply_transposed(std::span<const double> x) const;

  /// Rows `row_ids` and columns `col_ids` (in the given order) of this matrix.
  CsrMatrix submatrix(std::span<const int> row_ids, std::span<const int> col_ids) const;

  kernels::CsrView view() const { return {n_rows_, row_offsets_, col_indices_, values_}; }

  /// Coordinate text dump: "rows cols nnz" then one "i j value" line per entry.
  void write_coordinate(std::ostream& out) const;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<std::int32_t> col_indices_;
  std::vector<double> values_;
};

/// Sums duplicate entries. The result is bit-identical for any permutation of
/// `triplets`. Throws InvalidInput on out-of-range indices.
CsrMatrix assemble_from_triplets(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets);

/// Matrix-free square operator: apply(x, y) writes y = Op x.
struct LinearOperator {
  std::size_t dimension = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;

  Vector operator()(std::span<const double> x) const {
    Vector y(dimension);
    apply(x, y);
    return y;
  }
};

LinearOperator as_operator(const CsrMatrix& a);

struct SolveReport {
  Vector x;
  int iterations = 0;
  /// ||b - A x|| / ||b|| (zero for b = 0).
  double rel_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients from a zero initial guess.
SolveReport conjugate_gradient(const LinearOperator& a, std::span<const double> b, double rel_tol, int max_iters,
                               const LinearOperator* preconditioner = nullptr);

struct GmresOptions {
  double rel_tol = 1e-10;
  int restart = 50;
  /// Maximum number of restart cycles.
  int max_outer = 500;
};

/// Restarted GMRES (modified Gram-Schmidt, Givens rotations) with optional
/// right preconditioning. `iterations` counts Krylov steps over all cycles.
SolveReport gmres(const LinearOperator& a, std::span<const double> b, const GmresOptions& options = {},
                  const LinearOperator* preconditioner = nullptr);

/// Jacobi-preconditioned CG on an SPD matrix; throws SolverFailure if
/// ||A x - b|| <= rel_tol ||b|| is not reached.
Vector spd_solve(const CsrMatrix& a, std::span<const double> b, double rel_tol = 1e-12);

/// A reusable solver for one SPD matrix.
class SpdSolver {
 public:
  virtual ~SpdSolver() = default;
  virtual std::size_t size() const = 0;
  /// Throws SolverFailure.
  virtual Vector solve(std::span<const double> b) const = 0;
};

enum class SpdMethod {
  /// Sparse LDL^T with fill-reducing ordering; factor once, solve many times.
  cholesky,
  jacobi_cg,
};

std::unique_ptr<SpdSolver> make_spd_solver(const CsrMatrix& a, SpdMethod method, double cg_rel_tol = 1e-12);

}  // namespace dbc

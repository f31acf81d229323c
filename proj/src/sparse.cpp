#include "dbc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "dbc/error.hpp"

namespace dbc {

CsrMatrix::CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::int64_t> row_offsets,
                     std::vector<std::int32_t> col_indices, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
      static_cast<std::size_t>(row_offsets_.back()) != col_indices_.size() || col_indices_.size() != values_.size()) {
    throw InvalidInput("CSR arrays have inconsistent sizes");
  }
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (row_offsets_[r + 1] < row_offsets_[r]) throw InvalidInput("CSR row offsets decrease");
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto c = col_indices_[static_cast<std::size_t>(k)];
      if (c < 0 || static_cast<std::size_t>(c) >= n_cols_) throw InvalidInput("CSR column index out of range");
      if (k > row_offsets_[r] && col_indices_[static_cast<std::size_t>(k - 1)] >= c) {
        throw InvalidInput("CSR column indices not strictly increasing in row " + std::to_string(r));
      }
    }
  }
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_indices_.begin() + row_offsets_[r];
  const auto end = col_indices_.begin() + row_offsets_[r + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(c));
  if (it == end || *it != static_cast<std::int32_t>(c)) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vector CsrMatrix::diagonal() const {
  Vector d(std::min(n_rows_, n_cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool CsrMatrix::is_symmetric(double rel_tol) const {
  if (n_rows_ != n_cols_) return false;
  const double tol = rel_tol * max_abs();
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)]);
      if (std::abs(values_[static_cast<std::size_t>(k)] - at(c, r)) > tol) return false;
    }
  }
  return true;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_cols_ || y.size() != n_rows_) throw InvalidInput("matrix-vector dimension mismatch");
  kernels::spmv(view(), x, y);
}

Vector CsrMatrix::multiply(std::span<const double> x) const {
  Vector y(n_rows_);
  multiply(x, y);
  return y;
}

Vector CsrMatrix::multiply_transposed(std::span<const double> x) const {
  if (x.size() != n_rows_) throw InvalidInput("matrix-vector dimension mismatch");
  Vector y(n_cols_, 0.0);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      y[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])] += values_[static_cast<std::size_t>(k)] * x[r];
    }
  }
  return y;
}

CsrMatrix CsrMatrix::submatrix(std::span<const int> row_ids, std::span<const int> col_ids) const {
  std::vector<std::int32_t> col_map(n_cols_, -1);
  for (std::size_t j = 0; j < col_ids.size(); ++j) {
    const int c = col_ids[j];
    if (c < 0 || static_cast<std::size_t>(c) >= n_cols_) throw InvalidInput("submatrix column out of range");
    col_map[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(j);
  }
  std::vector<std::int64_t> offsets{0};
  offsets.reserve(row_ids.size() + 1);
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  std::vector<std::pair<std::int32_t, double>> row;
  for (int r : row_ids) {
    if (r < 0 || static_cast<std::size_t>(r) >= n_rows_) throw InvalidInput("submatrix row out of range");
    row.clear();
    for (auto k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k) {
      const std::int32_t mapped = col_map[static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)])];
      if (mapped >= 0) row.emplace_back(mapped, values_[static_cast<std::size_t>(k)]);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    offsets.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return CsrMatrix(row_ids.size(), col_ids.size(), std::move(offsets), std::move(cols), std::move(vals));
}

void CsrMatrix::write_coordinate(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << n_rows_ << ' ' << n_cols_ << ' ' << nnz() << '\n';
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      out << r << ' ' << col_indices_[static_cast<std::size_t>(k)] << ' ' << values_[static_cast<std::size_t>(k)] << '\n';
    }
  }
  out.precision(old_precision);
}

CsrMatrix assemble_from_triplets(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets) {
  // Bucket by row, then sort each row by (column, value) so duplicate sums do
  // not depend on the input order.
  std::vector<std::int64_t> count(n_rows + 1, 0);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= n_rows || t.col < 0 || static_cast<std::size_t>(t.col) >= n_cols) {
      throw InvalidInput("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ") out of range");
    }
    ++count[static_cast<std::size_t>(t.row) + 1];
  }
  for (std::size_t r = 0; r < n_rows; ++r) count[r + 1] += count[r];
  std::vector<std::pair<std::int32_t, double>> bucket(triplets.size());
  {
    std::vector<std::int64_t> fill(count.begin(), count.end() - 1);
    for (const Triplet& t : triplets) {
      bucket[static_cast<std::size_t>(fill[static_cast<std::size_t>(t.row)]++)] = {t.col, t.value};
    }
  }

  std::vector<std::int64_t> offsets(n_rows + 1, 0);
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto begin = bucket.begin() + count[r];
    const auto end = bucket.begin() + count[r + 1];
    std::sort(begin, end);
    for (auto it = begin; it != end;) {
      double sum = 0.0;
      const std::int32_t c = it->first;
      for (; it != end && it->first == c; ++it) sum += it->second;
      cols.push_back(c);
      vals.push_back(sum);
    }
    offsets[r + 1] = static_cast<std::int64_t>(cols.size());
  }
  return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

LinearOperator as_operator(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("operator from non-square matrix");
  return {a.rows(), [&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }};
}

namespace {

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

double relative_residual(const LinearOperator& a, std::span<const double> x, std::span<const double> b, double b_norm) {
  Vector r = a(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r) / b_norm;
}

}  // namespace

SolveReport conjugate_gradient(const LinearOperator& a, std::span<const double> b, double rel_tol, int max_iters,
                               const LinearOperator* preconditioner) {
  const std::size_t n = a.dimension;
  if (b.size() != n) throw InvalidInput("CG: right-hand side has wrong dimension");
  SolveReport rep;
  rep.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    rep.converged = true;
    return rep;
  }
  Vector r(n), z(n), p(n), q(n);
  auto precondition = [&](const Vector& in, Vector& out) {
    if (preconditioner) {
      preconditioner->apply(in, out);
    } else {
      out = in;
    }
  };
  // The recursive residual drifts from the true one near machine precision;
  // restart from the true residual a few times before giving up.
  for (int restart = 0; restart < 4 && rep.iterations < max_iters; ++restart) {
    a.apply(rep.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    rep.rel_residual = norm2(r) / b_norm;
    if (rep.rel_residual <= rel_tol) break;
    precondition(r, z);
    p = z;
    double rz = kernels::dot(r, z);
    while (rep.iterations < max_iters) {
      a.apply(p, q);
      const double pq = kernels::dot(p, q);
      if (!(pq > 0.0)) break;  // not positive definite, or breakdown
      const double alpha = rz / pq;
      kernels::axpy(alpha, p, rep.x);
      kernels::axpy(-alpha, q, r);
      ++rep.iterations;
      if (norm2(r) <= rel_tol * b_norm) break;
      precondition(r, z);
      const double rz_new = kernels::dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      kernels::xpby(z, beta, p);
    }
  }
  rep.rel_residual = relative_residual(a, rep.x, b, b_norm);
  rep.converged = rep.rel_residual <= rel_tol;
  return rep;
}

SolveReport gmres(const LinearOperator& a, std::span<const double> b, const GmresOptions& options,
                  const LinearOperator* preconditioner) {
  const std::size_t n = a.dimension;
  if (b.size() != n) throw InvalidInput("GMRES: right-hand side has wrong dimension");
  if (options.restart < 1 || options.max_outer < 1) throw InvalidInput("GMRES: restart and max_outer must be positive");
  SolveReport rep;
  rep.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    rep.converged = true;
    return rep;
  }
  const auto m = static_cast<std::size_t>(options.restart);
  const double target = options.rel_tol * b_norm;

  std::vector<Vector> basis(m + 1, Vector(n));
  std::vector<Vector> hess(m + 1, Vector(m, 0.0));  // hess[i][j]
  Vector cs(m), sn(m), g(m + 1), y(m), w(n), z(n);
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (preconditioner) {
      preconditioner->apply(in, out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };

  double best_residual = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < options.max_outer; ++outer) {
    a.apply(rep.x, w);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = b[i] - w[i];
    const double beta = norm2(basis[0]);
    rep.rel_residual = beta / b_norm;
    if (beta <= target) {
      rep.converged = true;
      return rep;
    }
    if (beta >= best_residual * (1.0 - 1e-12)) break;  // a full cycle made no progress
    best_residual = beta;
    for (double& v : basis[0]) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    std::size_t k = 0;
    for (; k < m; ++k) {
      precondition(basis[k], z);
      a.apply(z, w);
      for (std::size_t i = 0; i <= k; ++i) {
        hess[i][k] = kernels::dot(w, basis[i]);
        kernels::axpy(-hess[i][k], basis[i], w);
      }
      const double h_next = norm2(w);
      hess[k + 1][k] = h_next;
      for (std::size_t i = 0; i < k; ++i) {
        const double t = cs[i] * hess[i][k] + sn[i] * hess[i + 1][k];
        hess[i + 1][k] = -sn[i] * hess[i][k] + cs[i] * hess[i + 1][k];
        hess[i][k] = t;
      }
      const double denom = std::hypot(hess[k][k], hess[k + 1][k]);
      cs[k] = denom == 0.0 ? 1.0 : hess[k][k] / denom;
      sn[k] = denom == 0.0 ? 0.0 : hess[k + 1][k] / denom;
      hess[k][k] = denom;
      hess[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++rep.iterations;
      const bool breakdown = h_next <= 1e-300;
      if (!breakdown) {
        for (std::size_t i = 0; i < n; ++i) basis[k + 1][i] = w[i] / h_next;
      }
      if (std::abs(g[k + 1]) <= target || breakdown) {
        ++k;
        break;
      }
    }

    // Back substitution for the k x k triangular system, then x += M V y.
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= hess[i][j] * y[j];
      y[i] = hess[i][i] != 0.0 ? s / hess[i][i] : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) kernels::axpy(y[j], basis[j], w);
    precondition(w, z);
    kernels::axpy(1.0, z, rep.x);
  }
  rep.rel_residual = relative_residual(a, rep.x, b, b_norm);
  rep.converged = rep.rel_residual <= options.rel_tol;
  return rep;
}

Vector spd_solve(const CsrMatrix& a, std::span<const double> b, double rel_tol) {
  if (a.rows() != a.cols() || b.size() != a.rows()) throw InvalidInput("spd_solve: dimension mismatch");
  const Vector diag = a.diagonal();
  for (double d : diag) {
    if (!(d > 0.0)) throw InvalidInput("spd_solve: matrix has a non-positive diagonal entry");
  }
  const LinearOperator op = as_operator(a);
  const LinearOperator jacobi{a.rows(), [&diag](std::span<const double> x, std::span<double> y) {
                                for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / diag[i];
                              }};
  const int cap = static_cast<int>(std::max<std::size_t>(1000, 20 * a.rows()));
  SolveReport rep = conjugate_gradient(op, b, rel_tol, cap, &jacobi);
  if (!rep.converged) {
    throw SolverFailure("CG did not converge: relative residual " + std::to_string(rep.rel_residual), rep.rel_residual,
                        rep.iterations);
  }
  return std::move(rep.x);
}

namespace {

class JacobiCgSolver final : public SpdSolver {
 public:
  JacobiCgSolver(const CsrMatrix& a, double rel_tol) : a_(a), rel_tol_(rel_tol) {}
  std::size_t size() const override { return a_.rows(); }
  Vector solve(std::span<const double> b) const override { return spd_solve(a_, b, rel_tol_); }

 private:
  CsrMatrix a_;
  double rel_tol_;
};

}  // namespace

std::unique_ptr<SpdSolver> make_cholesky_solver(const CsrMatrix& a);  // cholesky.cpp

std::unique_ptr<SpdSolver> make_spd_solver(const CsrMatrix& a, SpdMethod method, double cg_rel_tol) {
  if (a.rows() != a.cols()) throw InvalidInput("SPD solver needs a square matrix");
  switch (method) {
    case SpdMethod::cholesky:
      return make_cholesky_solver(a);
    case SpdMethod::jacobi_cg:
      return std::make_unique<JacobiCgSolver>(a, cg_rel_tol);
  }
  throw InvalidInput("unknown SPD method");
}

}  // namespace dbc

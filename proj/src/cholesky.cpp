// Sparse LDL^T backend for SpdSolver (Eigen, AMD ordering).

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <string>

#include "dbc/error.hpp"
#include "dbc/sparse.hpp"

namespace dbc {

namespace {

using EigenCsr = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

class CholeskySolver final : public SpdSolver {
 public:
  explicit CholeskySolver(const CsrMatrix& a) : n_(a.rows()) {
    if (n_ == 0) return;
    // Lower triangle only, as a column-major matrix (CSR of A = CSC of A^T = CSC of A).
    std::vector<Eigen::Triplet<double, int>> lower;
    lower.reserve(a.nnz() / 2 + n_);
    const auto off = a.row_offsets();
    const auto col = a.col_indices();
    const auto val = a.values();
    for (std::size_t r = 0; r < n_; ++r) {
      for (auto k = off[r]; k < off[r + 1]; ++k) {
        const auto c = static_cast<std::size_t>(col[static_cast<std::size_t>(k)]);
        if (c <= r) lower.emplace_back(static_cast<int>(r), static_cast<int>(c), val[static_cast<std::size_t>(k)]);
      }
    }
    EigenCsr m(static_cast<int>(n_), static_cast<int>(n_));
    m.setFromTriplets(lower.begin(), lower.end());
    factor_.compute(m);
    if (factor_.info() != Eigen::Success) {
      throw SolverFailure("sparse LDL^T factorization failed", 0.0, 0);
    }
    const Eigen::VectorXd d = factor_.vectorD();
    if (d.size() > 0 && !(d.minCoeff() > 0.0)) {
      throw SolverFailure("matrix is not positive definite (LDL^T pivot " + std::to_string(d.minCoeff()) + ")", 0.0, 0);
    }
    if (d.size() > 0 && d.minCoeff() <= 1e-13 * d.maxCoeff()) {
      throw SolverFailure("matrix is singular to working precision (LDL^T pivot ratio " +
                              std::to_string(d.minCoeff() / d.maxCoeff()) + ")",
                          0.0, 0);
    }
  }

  std::size_t size() const override { return n_; }

  Vector solve(std::span<const double> b) const override {
    if (b.size() != n_) throw InvalidInput("Cholesky solve: dimension mismatch");
    Vector x(n_);
    if (n_ == 0) return x;
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n_)) = factor_.solve(rhs);
    return x;
  }

 private:
  std::size_t n_;
  Eigen::SimplicialLDLT<EigenCsr, Eigen::Lower, Eigen::AMDOrdering<int>> factor_;
};

}  // namespace

std::unique_ptr<SpdSolver> make_cholesky_solver(const CsrMatrix& a) { return std::make_unique<CholeskySolver>(a); }

}  // namespace dbc

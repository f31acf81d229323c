#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>

#include "dbc/boundary_ops.hpp"

namespace dbc::test {

inline Eigen::MatrixXd dense(const CsrMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (auto k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k) {
      d(static_cast<Eigen::Index>(r), a.col_indices()[static_cast<std::size_t>(k)]) += a.values()[static_cast<std::size_t>(k)];
    }
  }
  return d;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline TriMesh mesh_at(const std::string& domain, int passes) {
  return refine_uniform(initial_mesh(builtin_domain(domain)), passes);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace dbc::test

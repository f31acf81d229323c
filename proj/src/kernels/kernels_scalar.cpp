#include "dbc/kernels.hpp"

namespace dbc::kernels::scalar {

namespace {

// Four-lane blocked sum of products over [0, n); mirrors one AVX2 register.
template <class Prod>
double blocked_sum(std::size_t n, Prod&& prod) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += prod(i);
    s1 += prod(i + 1);
    s2 += prod(i + 2);
    s3 += prod(i + 3);
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += prod(i);
  return s;
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  return blocked_sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    const auto begin = static_cast<std::size_t>(a.row_offsets[r]);
    const auto end = static_cast<std::size_t>(a.row_offsets[r + 1]);
    const double* v = a.values.data() + begin;
    const std::int32_t* c = a.col_indices.data() + begin;
    y[r] = blocked_sum(end - begin, [&](std::size_t k) { return v[k] * x[static_cast<std::size_t>(c[k])]; });
  }
}

}  // namespace dbc::kernels::scalar

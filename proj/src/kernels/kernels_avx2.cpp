// Compiled with -mavx2 when DBC_HAVE_AVX2 is defined; only reached through
// dispatch after a CPUID check.

#include "dbc/kernels.hpp"

#include <stdexcept>

#if defined(DBC_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace dbc::kernels::avx2 {

#if defined(DBC_HAVE_AVX2)

namespace {

inline double reduce_lanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double s = reduce_lanes(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(a, _mm256_loadu_pd(x.data() + i));
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(_mm256_loadu_pd(y.data() + i), t));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d b = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(b, _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(_mm256_loadu_pd(x.data() + i), t));
  }
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    const auto begin = static_cast<std::size_t>(a.row_offsets[r]);
    const auto end = static_cast<std::size_t>(a.row_offsets[r + 1]);
    const std::size_t len = end - begin;
    const double* v = a.values.data() + begin;
    const std::int32_t* c = a.col_indices.data() + begin;
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= len; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(c + k));
      const __m256d xv = _mm256_i32gather_pd(x.data(), idx, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(v + k), xv));
    }
    double s = reduce_lanes(acc);
    for (; k < len; ++k) s += v[k] * x[static_cast<std::size_t>(c[k])];
    y[r] = s;
  }
}

#else

[[noreturn]] static void unavailable() { throw std::logic_error("AVX2 kernels not compiled in"); }

double dot(std::span<const double>, std::span<const double>) { unavailable(); }
void axpy(double, std::span<const double>, std::span<double>) { unavailable(); }
void xpby(std::span<const double>, double, std::span<double>) { unavailable(); }
void spmv(const CsrView&, std::span<const double>, std::span<double>) { unavailable(); }

#endif

}  // namespace dbc::kernels::avx2

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dbc/kernels.hpp"

namespace dbc::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DBC_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("DBC_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
  }
  current().store(b, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return active_backend() == Backend::avx2 ? avx2::dot(x, y) : scalar::dot(x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (active_backend() == Backend::avx2) {
    avx2::axpy(alpha, x, y);
  } else {
    scalar::axpy(alpha, x, y);
  }
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  if (active_backend() == Backend::avx2) {
    avx2::xpby(x, beta, y);
  } else {
    scalar::xpby(x, beta, y);
  }
}

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  if (active_backend() == Backend::avx2) {
    avx2::spmv(a, x, y);
  } else {
    scalar::spmv(a, x, y);
  }
}

}  // namespace dbc::kernels

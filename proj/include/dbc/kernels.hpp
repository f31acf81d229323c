#pragma once

// Dense vector and CSR kernels used by the iterative solvers.
//
// Every kernel has a scalar reference implementation and (on x86-64) an AVX2
// variant. Both use the same reduction order: four interleaved partial sums
// (lane = index mod 4) combined as (s0 + s1) + (s2 + s3), followed by the
// sequential tail. Together with -ffp-contract=off this makes the variants
// bit-identical, so solver output does not depend on the selected backend.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dbc::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

/// True if the running CPU and the build both support `b`.
bool backend_available(Backend b);

/// Backend used by the dispatching entry points below. Chosen once from the
/// CPU features; the environment variable DBC_SIMD=scalar forces the
/// reference path.
Backend active_backend();

/// Overrides the dispatch choice (tests and benchmarks). Throws
/// std::invalid_argument if `b` is not available.
void set_backend(Backend b);

/// Read-only view of a CSR matrix for the spmv kernels.
struct CsrView {
  std::size_t n_rows = 0;
  std::span<const std::int64_t> row_offsets;  // n_rows + 1 entries
  std::span<const std::int32_t> col_indices;
  std::span<const double> values;
};

double dot(std::span<const double> x, std::span<const double> y);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);
/// y = A x
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
}  // namespace avx2

}  // namespace dbc::kernels

#include <cmath>
#include <cstddef>

#include "colla/kernels.hpp"

// Reference kernels. Plain sequential loops; the oracle the SIMD variants are
// tested against.

namespace colla::kern {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double sum_sq_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sum_sq_diff_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

constexpr Ops kScalarOps = {
    dot_scalar,    axpy_scalar,        scal_scalar,
    sum_sq_scalar, sum_sq_diff_scalar, max_abs_scalar,
    "scalar",
};

}  // namespace

const Ops& scalar_ops() noexcept { return kScalarOps; }

}  // namespace colla::kern

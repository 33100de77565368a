#pragma once

#include <cstddef>

// Data-parallel arithmetic kernels behind all dense linear algebra in this
// project. Scalar reference implementations are always available; an AVX2/FMA
// variant is selected at runtime on x86-64 when the CPU supports it. The two
// backends are equivalence-tested against each other (see tests/test_kernels).
//
// Selection order: COLLA_KERNELS env var ("scalar" | "avx2" | "auto"),
// then CPU detection. force_backend() overrides both (used by tests).

namespace colla::kern {

enum class Backend { Auto, Scalar, Avx2 };

struct Ops {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scal)(double a, double* x, std::size_t n);
  // sum_i x[i]^2
  double (*sum_sq)(const double* x, std::size_t n);
  // sum_i (x[i] - y[i])^2
  double (*sum_sq_diff)(const double* x, const double* y, std::size_t n);
  // max_i |x[i]|  (0 for n = 0)
  double (*max_abs)(const double* x, std::size_t n);
  const char* name;
};

const Ops& scalar_ops() noexcept;
// nullptr when not compiled in or not supported by this CPU.
const Ops* avx2_ops() noexcept;
bool avx2_supported() noexcept;

// The active backend. Stable for the lifetime of the process unless
// force_backend() is called.
const Ops& active() noexcept;
void force_backend(Backend b) noexcept;

inline double dot(const double* x, const double* y, std::size_t n) noexcept {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) noexcept {
  active().axpy(a, x, y, n);
}
inline void scal(double a, double* x, std::size_t n) noexcept {
  active().scal(a, x, n);
}
inline double sum_sq(const double* x, std::size_t n) noexcept {
  return active().sum_sq(x, n);
}
inline double sum_sq_diff(const double* x, const double* y,
                          std::size_t n) noexcept {
  return active().sum_sq_diff(x, y, n);
}
inline double max_abs(const double* x, std::size_t n) noexcept {
  return active().max_abs(x, n);
}

}  // namespace colla::kern

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "colla/kernels.hpp"

// Small dense linear algebra over the kernel layer. Column-major throughout,
// which makes vec()/mat() on dictionaries free: a d-by-u matrix's storage IS
// its column-stacked vectorization.

namespace colla {

using Vec = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, Vec data);

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) {
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  double* col(std::size_t j) noexcept { return data_.data() + j * rows_; }
  const double* col(std::size_t j) const noexcept {
    return data_.data() + j * rows_;
  }
  const Vec& storage() const noexcept { return data_; }

  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double a);

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);

// y = A x
Vec matvec(const Matrix& a, std::span<const double> x);
// y = A^T x
Vec matvec_t(const Matrix& a, std::span<const double> x);
// A B
Matrix matmul(const Matrix& a, const Matrix& b);
// A^T B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// A A^T, symmetric
Matrix gram_nt(const Matrix& a);
// x y^T
Matrix outer(std::span<const double> x, std::span<const double> y);
Matrix transpose(const Matrix& a);

void add_diag(Matrix& a, double v);
// (A + A^T)/2 in place
void symmetrize(Matrix& a);

double fro_norm(const Matrix& a);
double fro_dist(const Matrix& a, const Matrix& b);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return kern::dot(x.data(), y.data(), x.size());
}
inline double norm2(std::span<const double> x) {
  return std::sqrt(kern::sum_sq(x.data(), x.size()));
}
bool all_finite(std::span<const double> x) noexcept;

// mat_{d,u}: reshape a length-(d*u) vector into a d-by-u matrix
// (column-stacking convention).
Matrix unvec(std::size_t rows, std::size_t cols, Vec v);

// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
// ok == false when a non-positive pivot is hit.
struct Cholesky {
  Matrix l;
  bool ok = false;

  static Cholesky factor(const Matrix& spd);
  Vec solve(std::span<const double> rhs) const;
  void solve_in_place(Vec& x) const;
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending order.
Vec sym_eigenvalues(const Matrix& sym);
// Smallest eigenvalue; Jacobi for small n, shifted inverse power iteration
// (deterministic start vector) for larger ones.
double sym_min_eigenvalue(const Matrix& sym);

}  // namespace colla

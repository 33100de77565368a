#include "colla/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "colla/errors.hpp"
#include "colla/util.hpp"

namespace colla {

Matrix::Matrix(std::size_t rows, std::size_t cols, Vec data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, Err::DimensionMismatch,
          "matrix storage size does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, Err::DimensionMismatch,
          "matrix add");
  kern::axpy(1.0, o.data(), data(), size());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, Err::DimensionMismatch,
          "matrix sub");
  kern::axpy(-1.0, o.data(), data(), size());
  return *this;
}

Matrix& Matrix::operator*=(double a) {
  kern::scal(a, data(), size());
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Vec matvec(const Matrix& a, std::span<const double> x) {
  require(x.size() == a.cols(), Err::DimensionMismatch, "matvec");
  Vec y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j)
    kern::axpy(x[j], a.col(j), y.data(), a.rows());
  return y;
}

Vec matvec_t(const Matrix& a, std::span<const double> x) {
  require(x.size() == a.rows(), Err::DimensionMismatch, "matvec_t");
  Vec y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    y[j] = kern::dot(a.col(j), x.data(), a.rows());
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), Err::DimensionMismatch, "matmul");
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k)
      kern::axpy(b(k, j), a.col(k), c.col(j), a.rows());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), Err::DimensionMismatch, "matmul_tn");
  Matrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i)
      c(i, j) = kern::dot(a.col(i), b.col(j), a.rows());
  return c;
}

Matrix gram_nt(const Matrix& a) {
  Matrix g(a.rows(), a.rows());
  for (std::size_t k = 0; k < a.cols(); ++k)
    for (std::size_t j = 0; j < a.rows(); ++j)
      kern::axpy(a(j, k), a.col(k), g.col(j), a.rows());
  symmetrize(g);
  return g;
}

Matrix outer(std::span<const double> x, std::span<const double> y) {
  Matrix m(x.size(), y.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    kern::axpy(y[j], x.data(), m.col(j), x.size());
  return m;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

void add_diag(Matrix& a, double v) {
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i) a(i, i) += v;
}

void symmetrize(Matrix& a) {
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

double fro_norm(const Matrix& a) {
  return std::sqrt(kern::sum_sq(a.data(), a.size()));
}

double fro_dist(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), Err::DimensionMismatch,
          "fro_dist");
  return std::sqrt(kern::sum_sq_diff(a.data(), b.data(), a.size()));
}

bool all_finite(std::span<const double> x) noexcept {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix unvec(std::size_t rows, std::size_t cols, Vec v) {
  return Matrix(rows, cols, std::move(v));
}

Cholesky Cholesky::factor(const Matrix& spd) {
  require(spd.rows() == spd.cols(), Err::DimensionMismatch, "cholesky");
  Cholesky ch;
  ch.l = spd;
  Matrix& l = ch.l;
  const std::size_t n = l.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = l(k, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      ch.ok = false;
      return ch;
    }
    const double lkk = std::sqrt(pivot);
    l(k, k) = lkk;
    const std::size_t tail = n - k - 1;
    if (tail > 0) {
      kern::scal(1.0 / lkk, &l(k + 1, k), tail);
      for (std::size_t j = k + 1; j < n; ++j)
        kern::axpy(-l(j, k), &l(j, k), &l(j, j), n - j);
    }
  }
  // zero the strict upper triangle so the factor is exactly lower triangular
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) l(i, j) = 0.0;
  ch.ok = true;
  return ch;
}

void Cholesky::solve_in_place(Vec& x) const {
  const std::size_t n = l.rows();
  require(x.size() == n, Err::DimensionMismatch, "cholesky solve");
  // forward: L y = b
  for (std::size_t j = 0; j < n; ++j) {
    x[j] /= l(j, j);
    if (j + 1 < n) kern::axpy(-x[j], &l(j + 1, j), &x[j + 1], n - j - 1);
  }
  // backward: L^T x = y
  for (std::size_t jj = n; jj-- > 0;) {
    double s = x[jj];
    if (jj + 1 < n) s -= kern::dot(&l(jj + 1, jj), &x[jj + 1], n - jj - 1);
    x[jj] = s / l(jj, jj);
  }
}

Vec Cholesky::solve(std::span<const double> rhs) const {
  Vec x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

namespace {

double off_diag_sq(const Matrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return s;
}

}  // namespace

Vec sym_eigenvalues(const Matrix& sym) {
  require(sym.rows() == sym.cols(), Err::DimensionMismatch, "sym_eigenvalues");
  Matrix a = sym;
  symmetrize(a);
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const double scale = fro_norm(a);
  const double stop = scale > 0 ? 1e-30 * scale * scale : 0.0;

  for (int sweep = 0; sweep < 64 && off_diag_sq(a) > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec evals(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = a(i, i);
  std::sort(evals.begin(), evals.end());
  return evals;
}

double sym_min_eigenvalue(const Matrix& sym) {
  const std::size_t n = sym.rows();
  if (n == 0) return 0.0;
  if (n <= 128) return sym_eigenvalues(sym).front();

  // Shifted inverse power iteration with a fixed pseudo-random start vector.
  Matrix a = sym;
  symmetrize(a);
  const double scale = std::max(fro_norm(a), 1.0);
  double shift = 1e-10 * scale;
  Cholesky ch;
  for (int tries = 0; tries < 60; ++tries) {
    Matrix b = a;
    add_diag(b, shift);
    ch = Cholesky::factor(b);
    if (ch.ok) break;
    shift *= 10.0;
  }
  require(ch.ok, Err::SolveFailure, "inverse iteration shift failed");

  Vec v(n);
  std::uint64_t state = 0x6b5fca3ad8f2e017ULL;
  for (std::size_t i = 0; i < n; ++i) {
    state = splitmix64(state);
    v[i] = static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0) - 0.5;
  }
  kern::scal(1.0 / norm2(v), v.data(), n);

  double rayleigh = 0.0;
  for (int it = 0; it < 300; ++it) {
    ch.solve_in_place(v);
    kern::scal(1.0 / norm2(v), v.data(), n);
    const Vec av = matvec(a, v);
    const double r = kern::dot(v.data(), av.data(), n);
    if (it > 2 && std::fabs(r - rayleigh) <= 1e-12 * (std::fabs(r) + 1e-12)) {
      rayleigh = r;
      break;
    }
    rayleigh = r;
  }
  return rayleigh;
}

}  // namespace colla

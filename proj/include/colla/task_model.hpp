#pragma once

#include <string>

#include "colla/errors.hpp"
#include "colla/linalg.hpp"

// Single-task base learners. Each task is compressed into a TaskEncoding:
// the ridge-optimal parameter vector alpha and the Hessian of the empirical
// loss at alpha. Everything downstream works on encodings, never on raw data.

namespace colla {

enum class TaskKind { Regression, Classification };

struct TaskData {
  Matrix features;  // d rows, M columns (one column per instance)
  Vec targets;      // length M; classification targets in {-1, +1}
  TaskKind kind = TaskKind::Regression;
  std::string task_id;

  std::size_t dim() const noexcept { return features.rows(); }
  std::size_t n_instances() const noexcept { return features.cols(); }
  // Throws NonFiniteInput / DimensionMismatch / UnknownLabel.
  void validate() const;
};

struct TaskEncoding {
  Vec alpha;         // length d
  Matrix gamma_mat;  // d x d, symmetric, eigenvalues >= 1e-8 after jitter
  double ridge_reg = 0.0;
};

// Floor applied to gamma_mat's spectrum; see jitter_spd().
inline constexpr double kGammaEigenFloor = 1e-8;

// Symmetrize, then raise the smallest eigenvalue to at least the floor by
// adding a multiple of the identity. The loss Hessians are PSD by
// construction, so the added jitter is effectively floor * I.
void jitter_spd(Matrix& sym, double floor = kGammaEigenFloor);

// Ridge regression: alpha = argmin (1/M)||X^T a - y||^2 + g ||a||^2 via the
// SPD normal equations; gamma_mat = (2/M) X X^T (loss term only, no ridge).
TaskEncoding fit_ridge_regression(const TaskData& data, double ridge_reg);

// L2-regularized logistic regression by damped Newton iterations on
// (1/M) sum log(1 + exp(-y_m theta.x_m)) + g ||theta||^2.
// gamma_mat = (1/M) sum w_m x_m x_m^T with w_m = sig_m (1 - sig_m) and
// sig_m = sigmoid(y_m alpha.x_m), evaluated at alpha.
TaskEncoding fit_logistic(const TaskData& data, double ridge_reg,
                          int max_iter = 100, double tol = 1e-8);

// Thrown when Newton fails to reach tol; carries the last iterate.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, TaskEncoding last)
      : Error(Err::NoConvergence, what), last_iterate(std::move(last)) {}
  TaskEncoding last_iterate;
};

// Raw linear score theta.x (the AUC ranking score for classification).
double predict_score(std::span<const double> theta, std::span<const double> x);

// Regression: theta.x. Classification: the label sign(theta.x), sign(0) = +1.
double predict(std::span<const double> theta, std::span<const double> x,
               TaskKind kind);

// Gradient of the regularized empirical objective at theta; shared with the
// tests that assert first-order optimality of the fitted encodings.
Vec objective_gradient(const TaskData& data, double ridge_reg,
                       std::span<const double> theta);

}  // namespace colla

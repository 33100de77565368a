#include "colla/task_model.hpp"

#include <cmath>

namespace colla {

void TaskData::validate() const {
  require(features.rows() >= 1 && features.cols() >= 1, Err::EmptyInput,
          "task '" + task_id + "' has no data");
  require(targets.size() == features.cols(), Err::DimensionMismatch,
          "task '" + task_id + "': targets/features instance count mismatch");
  require(features.all_finite() && all_finite(targets), Err::NonFiniteInput,
          "task '" + task_id + "' contains non-finite values");
  if (kind == TaskKind::Classification) {
    for (double y : targets)
      require(y == 1.0 || y == -1.0, Err::UnknownLabel,
              "task '" + task_id + "': classification target not in {-1,+1}");
  }
}

void jitter_spd(Matrix& sym, double floor) {
  symmetrize(sym);
  const double lo = sym_min_eigenvalue(sym);
  if (lo < floor) add_diag(sym, floor - std::min(lo, 0.0));
}

TaskEncoding fit_ridge_regression(const TaskData& data, double ridge_reg) {
  data.validate();
  require(data.kind == TaskKind::Regression, Err::DimensionMismatch,
          "fit_ridge_regression on a classification task");
  require(ridge_reg > 0.0, Err::BadSpec, "ridge_reg must be positive");

  const double inv_m = 1.0 / static_cast<double>(data.n_instances());
  Matrix hessian = gram_nt(data.features);  // X X^T
  hessian *= 2.0 * inv_m;

  Matrix system = hessian;
  add_diag(system, 2.0 * ridge_reg);
  Vec rhs = matvec(data.features, data.targets);
  kern::scal(2.0 * inv_m, rhs.data(), rhs.size());

  const Cholesky ch = Cholesky::factor(system);
  require(ch.ok, Err::SolveFailure,
          "ridge normal equations singular for task '" + data.task_id + "'");

  TaskEncoding enc;
  enc.alpha = ch.solve(rhs);
  enc.gamma_mat = std::move(hessian);
  jitter_spd(enc.gamma_mat);
  enc.ridge_reg = ridge_reg;
  require(all_finite(enc.alpha), Err::SolveFailure,
          "ridge solve produced non-finite alpha");
  return enc;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) {
  if (z > 0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double logistic_objective(const TaskData& data, double ridge_reg,
                          const Vec& theta) {
  const std::size_t m = data.n_instances();
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double z =
        data.targets[i] * kern::dot(theta.data(), data.features.col(i), theta.size());
    loss += softplus_neg(z);
  }
  return loss / static_cast<double>(m) +
         ridge_reg * kern::sum_sq(theta.data(), theta.size());
}

}  // namespace

Vec objective_gradient(const TaskData& data, double ridge_reg,
                       std::span<const double> theta) {
  const std::size_t d = data.dim();
  const std::size_t m = data.n_instances();
  require(theta.size() == d, Err::DimensionMismatch, "objective_gradient");
  const double inv_m = 1.0 / static_cast<double>(m);
  Vec g(d, 0.0);
  if (data.kind == TaskKind::Regression) {
    for (std::size_t i = 0; i < m; ++i) {
      const double r =
          kern::dot(theta.data(), data.features.col(i), d) - data.targets[i];
      kern::axpy(2.0 * inv_m * r, data.features.col(i), g.data(), d);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      const double y = data.targets[i];
      const double z = y * kern::dot(theta.data(), data.features.col(i), d);
      kern::axpy(-inv_m * y * sigmoid(-z), data.features.col(i), g.data(), d);
    }
  }
  kern::axpy(2.0 * ridge_reg, theta.data(), g.data(), d);
  return g;
}

TaskEncoding fit_logistic(const TaskData& data, double ridge_reg, int max_iter,
                          double tol) {
  data.validate();
  require(data.kind == TaskKind::Classification, Err::DimensionMismatch,
          "fit_logistic on a regression task");
  require(ridge_reg > 0.0, Err::BadSpec, "ridge_reg must be positive");

  const std::size_t d = data.dim();
  const std::size_t m = data.n_instances();
  const double inv_m = 1.0 / static_cast<double>(m);

  Vec theta(d, 0.0);
  double obj = logistic_objective(data, ridge_reg, theta);
  bool converged = false;

  for (int it = 0; it < max_iter; ++it) {
    const Vec grad = objective_gradient(data, ridge_reg, theta);
    if (norm2(grad) <= tol) {
      converged = true;
      break;
    }
    // Newton direction on the regularized objective
    Matrix h(d, d);
    for (std::size_t i = 0; i < m; ++i) {
      const double z =
          data.targets[i] * kern::dot(theta.data(), data.features.col(i), d);
      const double sig = sigmoid(z);
      const double w = inv_m * sig * (1.0 - sig);
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j)
        kern::axpy(w * data.features(j, i), data.features.col(i), h.col(j), d);
    }
    symmetrize(h);
    add_diag(h, 2.0 * ridge_reg);
    const Cholesky ch = Cholesky::factor(h);
    require(ch.ok, Err::SolveFailure, "logistic Newton system not SPD");
    Vec step = ch.solve(grad);

    // step halving until the objective decreases
    double scale = 1.0;
    Vec trial(d);
    for (int halves = 0; halves < 40; ++halves) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = theta[j] - scale * step[j];
      const double trial_obj = logistic_objective(data, ridge_reg, trial);
      if (trial_obj <= obj) {
        theta = trial;
        obj = trial_obj;
        break;
      }
      scale *= 0.5;
    }
  }

  if (!converged) {
    const Vec grad = objective_gradient(data, ridge_reg, theta);
    converged = norm2(grad) <= tol;
  }

  TaskEncoding enc;
  enc.alpha = theta;
  enc.gamma_mat = Matrix(d, d);
  for (std::size_t i = 0; i < m; ++i) {
    const double z =
        data.targets[i] * kern::dot(theta.data(), data.features.col(i), d);
    const double sig = sigmoid(z);
    const double w = inv_m * sig * (1.0 - sig);
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j)
      kern::axpy(w * data.features(j, i), data.features.col(i),
                 enc.gamma_mat.col(j), d);
  }
  jitter_spd(enc.gamma_mat);
  enc.ridge_reg = ridge_reg;

  if (!converged)
    throw NoConvergenceError(
        "logistic Newton did not reach tol on task '" + data.task_id + "'",
        std::move(enc));
  return enc;
}

double predict_score(std::span<const double> theta,
                     std::span<const double> x) {
  require(theta.size() == x.size(), Err::DimensionMismatch, "predict_score");
  return kern::dot(theta.data(), x.data(), theta.size());
}

double predict(std::span<const double> theta, std::span<const double> x,
               TaskKind kind) {
  const double score = predict_score(theta, x);
  if (kind == TaskKind::Regression) return score;
  return score < 0.0 ? -1.0 : 1.0;  // sign(0) = +1
}

}  // namespace colla

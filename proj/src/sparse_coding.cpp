#include "colla/sparse_coding.hpp"

#include <cmath>

#include "colla/errors.hpp"

namespace colla {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Residual of the quadratic part in "gradient form": r = c - G s, so the
// quadratic's partial derivative is -2 r_j.
double kkt_from_residual(std::span<const double> s, std::span<const double> r,
                         double mu) {
  double worst = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    double v;
    if (s[j] != 0.0) {
      v = std::fabs(-2.0 * r[j] + mu * (s[j] > 0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, 2.0 * std::fabs(r[j]) - mu);
    }
    if (v > worst) worst = v;
  }
  return worst;
}

}  // namespace

double weighted_lasso_objective(const Matrix& dict, const TaskEncoding& enc,
                                double mu, std::span<const double> s) {
  require(dict.rows() == enc.alpha.size() && dict.cols() == s.size(),
          Err::DimensionMismatch, "weighted_lasso_objective");
  Vec resid = matvec(dict, s);  // L s
  kern::axpy(-1.0, enc.alpha.data(), resid.data(), resid.size());
  kern::scal(-1.0, resid.data(), resid.size());  // alpha - L s
  const Vec weighted = matvec(enc.gamma_mat, resid);
  double obj = kern::dot(resid.data(), weighted.data(), resid.size());
  for (double v : s) obj += mu * std::fabs(v);
  return obj;
}

SparseCode solve_weighted_lasso(const Matrix& dict, const TaskEncoding& enc,
                                double mu, const LassoOptions& opts) {
  const std::size_t d = dict.rows();
  const std::size_t u = dict.cols();
  require(u >= 1, Err::DimensionMismatch, "dictionary has no columns");
  require(enc.alpha.size() == d, Err::DimensionMismatch,
          "alpha/dictionary dimension mismatch");
  require(mu >= 0.0, Err::BadSpec, "mu must be non-negative");

  // Gamma = C C^T; the weighted problem becomes a plain LASSO in
  // (C^T alpha, C^T L).
  const Cholesky ch = Cholesky::factor(enc.gamma_mat);
  require(ch.ok, Err::CholeskyFailure,
          "gamma_mat is not SPD; encoding jitter policy was bypassed");
  const Matrix xt = matmul_tn(ch.l, dict);       // C^T L, d x u
  const Vec yt = matvec_t(ch.l, enc.alpha);      // C^T alpha

  // Precompute gram = X^T X and c = X^T y of the transformed problem.
  const Matrix gram = matmul_tn(xt, xt);
  Vec c = matvec_t(xt, yt);

  SparseCode code;
  code.s.assign(u, 0.0);
  if (opts.warm_start) {
    require(opts.warm_start->size() == u, Err::DimensionMismatch,
            "warm start size");
    code.s = *opts.warm_start;
  }

  // r = c - G s, maintained incrementally
  Vec r = c;
  for (std::size_t j = 0; j < u; ++j)
    if (code.s[j] != 0.0) kern::axpy(-code.s[j], gram.col(j), r.data(), u);

  const double half_mu = 0.5 * mu;
  int sweeps = 0;
  code.converged = false;
  while (sweeps < opts.max_iter) {
    for (std::size_t j = 0; j < u; ++j) {
      const double old = code.s[j];
      const double gjj = gram(j, j);
      double next = 0.0;
      if (gjj > 0.0) {
        const double zj = r[j] + gjj * old;  // c_j - sum_{k != j} G_jk s_k
        next = soft_threshold(zj, half_mu) / gjj;
      }
      // columns of L that are identically zero get a zero code
      if (next != old) {
        kern::axpy(old - next, gram.col(j), r.data(), u);
        code.s[j] = next;
      }
    }
    ++sweeps;
    if (opts.objective_trace)
      opts.objective_trace->push_back(
          weighted_lasso_objective(dict, enc, mu, code.s));
    if (kkt_from_residual(code.s, r, mu) <= opts.tol) {
      code.converged = true;
      break;
    }
  }
  code.iterations = sweeps;

  for (std::size_t j = 0; j < u; ++j)
    if (code.s[j] != 0.0) code.support.push_back(static_cast<int>(j));
  code.objective_value = weighted_lasso_objective(dict, enc, mu, code.s);
  return code;
}

double kkt_residual(const Matrix& dict, const TaskEncoding& enc, double mu,
                    std::span<const double> s) {
  require(dict.rows() == enc.alpha.size() && dict.cols() == s.size(),
          Err::DimensionMismatch, "kkt_residual");
  // grad of quadratic = 2 L^T Gamma (L s - alpha); computed directly rather
  // than through the coordinate-descent cache.
  Vec t = matvec(dict, s);
  kern::axpy(-1.0, enc.alpha.data(), t.data(), t.size());
  const Vec w = matvec(enc.gamma_mat, t);
  const Vec g = matvec_t(dict, w);
  double worst = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    double v;
    if (s[j] != 0.0) {
      v = std::fabs(2.0 * g[j] + mu * (s[j] > 0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, 2.0 * std::fabs(g[j]) - mu);
    }
    if (v > worst) worst = v;
  }
  return worst;
}

}  // namespace colla

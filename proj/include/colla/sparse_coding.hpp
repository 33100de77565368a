#pragma once

#include <vector>

#include "colla/linalg.hpp"
#include "colla/task_model.hpp"

// Per-task sparse coding: minimize ||alpha - L s||^2_Gamma + mu ||s||_1 over
// the code s, for a fixed dictionary L. The weighted problem is reduced to a
// standard LASSO through the Cholesky factor of Gamma and solved by cyclic
// coordinate descent with exact soft-threshold steps.

namespace colla {

struct SparseCode {
  Vec s;                     // length u
  std::vector<int> support;  // indices with s[j] != 0, ascending
  double objective_value = 0.0;
  int iterations = 0;   // completed full sweeps
  bool converged = true;  // false = MaxIterReached (non-fatal, flagged)
};

struct LassoOptions {
  double tol = 1e-8;    // KKT residual target
  int max_iter = 10000;  // full coordinate sweeps
  const Vec* warm_start = nullptr;          // previous code when re-coding
  std::vector<double>* objective_trace = nullptr;  // per-sweep, for tests
};

// Throws CholeskyFailure when Gamma is not SPD (jitter policy bypassed).
SparseCode solve_weighted_lasso(const Matrix& dict, const TaskEncoding& enc,
                                double mu, const LassoOptions& opts = {});

// Maximum violation of the LASSO subgradient optimality conditions at s:
// on-support |2 (G s - c)_j + mu sign(s_j)|, off-support |2 (G s - c)_j| - mu
// clamped at zero, with G = L^T Gamma L and c = L^T Gamma alpha.
double kkt_residual(const Matrix& dict, const TaskEncoding& enc, double mu,
                    std::span<const double> s);

// ||alpha - L s||^2_Gamma + mu ||s||_1, recomputed from scratch.
double weighted_lasso_objective(const Matrix& dict, const TaskEncoding& enc,
                                double mu, std::span<const double> s);

}  // namespace colla

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "colla/linalg.hpp"
#include "colla/task_model.hpp"

// Metrics, data splitting, and result containers. Metrics are oriented
// internally to "higher is better" (RMSE is negated) so selection and
// comparison logic is a single argmax everywhere.

namespace colla {

// sqrt(mean squared error). Throws EmptyInput.
double rmse(std::span<const double> predictions,
            std::span<const double> targets);

// Rank-based (Mann-Whitney) AUC with ties contributing 1/2. Labels must be
// in {-1, +1} with at least one of each; throws DegenerateLabels otherwise.
double auc(std::span<const double> scores, std::span<const double> labels);

struct SplitSpec {
  std::uint64_t seed = 0;
  double fraction = 0.5;  // train share, ceil(M * fraction) instances
};

// Deterministic shuffle-and-cut split; classification tasks are stratified
// per class when both classes have at least 2 instances. Throws
// TooFewInstances when M < 2.
std::pair<TaskData, TaskData> split_task(const TaskData& data,
                                         const SplitSpec& spec);

// Everything a finished experiment run exposes. Matrices are
// n_trials x T_max. Learning-curve entry (r, t) is the unweighted mean test
// metric over all tasks learned network-wide up to step t+1 in trial r,
// re-evaluated with the current dictionaries but the codes fixed at learning
// time.
struct ExperimentResult {
  Matrix metrics;
  Matrix consensus;  // consensus residual after each step (0 when edgeless)
  Matrix drift;      // || Lbar(t) - Lbar(t-1) ||_F, mean dictionary
  // per trial: task_id -> metric at the step the task was learned
  std::vector<std::map<std::string, double>> first_eval;
  // per trial: task_id -> metric after the final step
  std::vector<std::map<std::string, double>> final_metrics;
  TaskKind kind = TaskKind::Regression;
  double wall_seconds = 0.0;
  bool flagged_no_convergence = false;

  std::size_t n_trials() const noexcept { return metrics.rows(); }
  std::size_t t_max() const noexcept { return metrics.cols(); }
};

// Metric value on the "higher is better" scale.
inline double oriented(double metric, TaskKind kind) {
  return kind == TaskKind::Regression ? -metric : metric;
}

// Mean over tasks and trials of the percent improvement of the method over
// single-task learning at each task's first evaluation. Positive = better
// (AUC up, RMSE down). Throws MissingPair when the runs are not paired.
double jumpstart(const ExperimentResult& method, const ExperimentResult& stl);

// Per-trial jumpstart values (used for paired win counts).
Vec jumpstart_per_trial(const ExperimentResult& method,
                        const ExperimentResult& stl);

// Least-squares slope of log(values[t]) against log(t) for time steps in
// [t_lo, t_hi] (1-based); non-positive values are skipped.
double loglog_slope(std::span<const double> values, int t_lo, int t_hi);

double mean(std::span<const double> xs);
// Standard error of the mean (sd / sqrt(n), n-1 denominator; 0 for n < 2).
double standard_error(std::span<const double> xs);

}  // namespace colla

#include "colla/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "colla/errors.hpp"
#include "colla/util.hpp"

namespace colla {

double rmse(std::span<const double> predictions,
            std::span<const double> targets) {
  require(!predictions.empty(), Err::EmptyInput, "rmse of empty vectors");
  require(predictions.size() == targets.size(), Err::DimensionMismatch,
          "rmse length mismatch");
  const double ss =
      kern::sum_sq_diff(predictions.data(), targets.data(), targets.size());
  return std::sqrt(ss / static_cast<double>(targets.size()));
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  require(scores.size() == labels.size(), Err::DimensionMismatch,
          "auc length mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (double y : labels) {
    require(y == 1.0 || y == -1.0, Err::UnknownLabel, "auc label not in {-1,+1}");
    (y > 0 ? n_pos : n_neg)++;
  }
  require(n_pos > 0 && n_neg > 0, Err::DegenerateLabels,
          "auc needs both classes");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // average ranks over tied score groups
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (labels[idx[k]] > 0) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

namespace {

TaskData gather(const TaskData& data, const std::vector<std::size_t>& rows) {
  TaskData out;
  out.kind = data.kind;
  out.task_id = data.task_id;
  out.features = Matrix(data.dim(), rows.size());
  out.targets.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::copy_n(data.features.col(rows[k]), data.dim(), out.features.col(k));
    out.targets[k] = data.targets[rows[k]];
  }
  return out;
}

}  // namespace

std::pair<TaskData, TaskData> split_task(const TaskData& data,
                                         const SplitSpec& spec) {
  data.validate();
  const std::size_t m = data.n_instances();
  require(m >= 2, Err::TooFewInstances,
          "task '" + data.task_id + "' has fewer than 2 instances");
  require(spec.fraction > 0.0 && spec.fraction < 1.0, Err::BadSpec,
          "split fraction must be in (0,1)");

  std::mt19937_64 rng(splitmix64(spec.seed));
  std::vector<std::size_t> train_rows, test_rows;

  const auto cut = [&](std::vector<std::size_t>& pool) {
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t n_train = static_cast<std::size_t>(
        std::ceil(static_cast<double>(pool.size()) * spec.fraction));
    for (std::size_t k = 0; k < pool.size(); ++k)
      (k < n_train ? train_rows : test_rows).push_back(pool[k]);
  };

  bool stratified = false;
  if (data.kind == TaskKind::Classification) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < m; ++i)
      (data.targets[i] > 0 ? pos : neg).push_back(i);
    if (pos.size() >= 2 && neg.size() >= 2) {
      cut(pos);
      cut(neg);
      stratified = true;
    }
  }
  if (!stratified) {
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    cut(all);
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {gather(data, train_rows), gather(data, test_rows)};
}

namespace {

// Percent improvement of `method` over `base`, oriented positive = better.
double improvement_pct(double method_metric, double base_metric,
                       TaskKind kind) {
  const double denom = std::fabs(base_metric);
  if (denom < 1e-300) return 0.0;
  if (kind == TaskKind::Regression)
    return 100.0 * (base_metric - method_metric) / denom;
  return 100.0 * (method_metric - base_metric) / denom;
}

}  // namespace

Vec jumpstart_per_trial(const ExperimentResult& method,
                        const ExperimentResult& stl) {
  require(method.n_trials() == stl.n_trials() && method.n_trials() > 0,
          Err::MissingPair, "jumpstart: trial counts differ");
  require(method.kind == stl.kind, Err::MissingPair,
          "jumpstart: task kinds differ");
  Vec out;
  out.reserve(method.n_trials());
  for (std::size_t r = 0; r < method.n_trials(); ++r) {
    const auto& mine = method.first_eval[r];
    const auto& base = stl.first_eval[r];
    require(mine.size() == base.size(), Err::MissingPair,
            "jumpstart: task sets differ in trial " + std::to_string(r));
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& [task_id, metric] : mine) {
      const auto it = base.find(task_id);
      require(it != base.end(), Err::MissingPair,
              "jumpstart: task '" + task_id + "' missing from baseline");
      acc += improvement_pct(metric, it->second, method.kind);
      ++n;
    }
    out.push_back(n ? acc / static_cast<double>(n) : 0.0);
  }
  return out;
}

double jumpstart(const ExperimentResult& method, const ExperimentResult& stl) {
  const Vec per_trial = jumpstart_per_trial(method, stl);
  return mean(per_trial);
}

double loglog_slope(std::span<const double> values, int t_lo, int t_hi) {
  require(t_lo >= 1 && t_hi >= t_lo, Err::BadSpec, "loglog_slope range");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (int t = t_lo; t <= t_hi && t <= static_cast<int>(values.size()); ++t) {
    const double v = values[static_cast<std::size_t>(t - 1)];
    if (!(v > 0.0)) continue;
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  require(n >= 2, Err::EmptyInput, "loglog_slope: fewer than 2 usable points");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

double mean(std::span<const double> xs) {
  require(!xs.empty(), Err::EmptyInput, "mean of empty vector");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

}  // namespace colla

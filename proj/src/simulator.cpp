#include "colla/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "colla/errors.hpp"

namespace colla {

namespace {

constexpr std::uint64_t kDictInitTag = 0xd1c7;
constexpr std::uint64_t kSplitTag = 0x5b17;

}  // namespace

Method method_from_string(const std::string& s) {
  if (s == "colla") return Method::CoLLA;
  if (s == "ella") return Method::ELLA;
  if (s == "stl") return Method::STL;
  if (s == "gomtl") return Method::GoMTL;
  if (s == "offline_colla") return Method::OfflineCoLLA;
  fail(Err::ConfigError, "unknown method '" + s + "'");
}

const char* method_to_string(Method m) noexcept {
  switch (m) {
    case Method::CoLLA: return "colla";
    case Method::ELLA: return "ella";
    case Method::STL: return "stl";
    case Method::GoMTL: return "gomtl";
    case Method::OfflineCoLLA: return "offline_colla";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  require(u >= 1, Err::ConfigError, "u must be >= 1");
  require(lambda > 0.0, Err::ConfigError, "lambda must be positive");
  require(mu >= 0.0, Err::ConfigError, "mu must be non-negative");
  require(rho >= 0.0, Err::ConfigError, "rho must be non-negative");
  require(ridge_reg > 0.0, Err::ConfigError, "ridge_reg must be positive");
  require(n_agents >= 1, Err::TooFewAgents, "n_agents must be >= 1");
  require(k_schedule.k1 >= 0 && k_schedule.k2 >= 0 &&
              k_schedule.k1 + k_schedule.k2 >= 1,
          Err::ConfigError, "K schedule must give at least one iteration");
  require(n_trials >= 1, Err::ConfigError, "n_trials must be >= 1");
  require(split_fraction > 0.0 && split_fraction < 1.0, Err::ConfigError,
          "split_fraction must be in (0,1)");
}

void TaskStream::validate() const {
  std::set<std::string> seen;
  for (const auto& row : per_agent) {
    require(row.size() == t_max(), Err::DimensionMismatch,
            "task streams must have equal length (synchrony)");
    for (const auto& id : row)
      require(seen.insert(id).second, Err::DimensionMismatch,
              "task '" + id + "' assigned twice");
  }
}

TaskStream make_streams(const TaskTable& tasks, const ExperimentConfig& cfg,
                        int trial, Log* log) {
  std::vector<std::string> ids;
  ids.reserve(tasks.size());
  for (const auto& [id, data] : tasks) ids.push_back(id);
  if (cfg.shuffle_tasks) {
    std::mt19937_64 rng(mix_seed(cfg.stream_seed, static_cast<std::uint64_t>(trial)));
    std::shuffle(ids.begin(), ids.end(), rng);
  }
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);
  const std::size_t t_max = ids.size() / n;
  require(t_max >= 1, Err::EmptyInput, "fewer tasks than agents");
  const std::size_t dropped = ids.size() - t_max * n;
  if (dropped > 0 && log)
    log->note("dropping " + std::to_string(dropped) +
              " remainder task(s) to keep streams equal length");

  TaskStream stream;
  stream.per_agent.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    stream.per_agent[i].reserve(t_max);
    for (std::size_t t = 0; t < t_max; ++t)
      stream.per_agent[i].push_back(ids[t * n + i]);
  }
  stream.validate();
  return stream;
}

SplitFn default_split_fn(const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.split_seed;
  const double fraction = cfg.split_fraction;
  return [seed, fraction](const TaskData& data, int trial) {
    const SplitSpec spec{
        mix_seed(mix_seed(seed, static_cast<std::uint64_t>(trial)),
                 fnv1a(data.task_id) ^ kSplitTag),
        fraction};
    return split_task(data, spec);
  };
}

Matrix init_dictionary(std::size_t d, std::size_t u, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix l(d, u);
  for (std::size_t j = 0; j < u; ++j) {
    for (std::size_t i = 0; i < d; ++i) l(i, j) = normal(rng);
    const double nrm = std::sqrt(kern::sum_sq(l.col(j), d));
    if (nrm > 0) kern::scal(1.0 / nrm, l.col(j), d);
  }
  return l;
}

double pooled_objective(
    const std::vector<std::pair<const TaskEncoding*, const SparseCode*>>& tasks,
    const Matrix& dict, double mu, double lambda) {
  require(!tasks.empty(), Err::EmptyInput, "pooled_objective with no tasks");
  double sum = 0.0;
  for (const auto& [enc, code] : tasks)
    sum += weighted_lasso_objective(dict, *enc, mu, code->s);
  const double fn = fro_norm(dict);
  return sum / static_cast<double>(tasks.size()) + lambda * fn * fn;
}

namespace {

struct TrialOutput {
  Vec curve, consensus, drift;
  std::map<std::string, double> first_eval, final_metrics;
  bool flagged = false;
  std::vector<std::string> notes;

  void note(const std::string& s) { notes.push_back(s); }
};

TaskEncoding fit_task(const TaskData& train, double ridge_reg) {
  return train.kind == TaskKind::Regression
             ? fit_ridge_regression(train, ridge_reg)
             : fit_logistic(train, ridge_reg);
}

double metric_for_task(const Vec& theta, const TaskData& test) {
  const std::size_t d = test.dim();
  const std::size_t m = test.n_instances();
  Vec scores(m);
  for (std::size_t i = 0; i < m; ++i)
    scores[i] = predict_score(theta, std::span<const double>(test.features.col(i), d));
  if (test.kind == TaskKind::Regression) return rmse(scores, test.targets);
  return auc(scores, test.targets);
}

Matrix mean_dict(const std::vector<Matrix>& dicts) {
  Matrix m = dicts.front();
  for (std::size_t i = 1; i < dicts.size(); ++i) m += dicts[i];
  m *= 1.0 / static_cast<double>(dicts.size());
  return m;
}

[[noreturn]] void rethrow_with_context(const Error& e, int t, int agent) {
  fail(e.code(), "(t=" + std::to_string(t) + ", agent=" +
                     std::to_string(agent) + ") " + e.message());
}

// Mean test metric over all learned (agent, task) pairs; theta = L_i s.
// Tasks whose test labels degenerate are skipped with a note.
double average_seen_metric(
    const std::vector<AgentState>& agents, const std::vector<Matrix>& dicts,
    const std::map<std::string, TaskData>& test_split, TrialOutput& out,
    std::map<std::string, double>* per_task) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (const auto& [id, code] : agents[i].codes) {
      const Vec theta = matvec(dicts[i], code.s);
      double metric;
      try {
        metric = metric_for_task(theta, test_split.at(id));
      } catch (const Error& e) {
        if (e.code() != Err::DegenerateLabels) throw;
        out.note("task '" + id + "' excluded from step average: " + e.message());
        continue;
      }
      sum += metric;
      ++n;
      if (per_task) (*per_task)[id] = metric;
    }
  }
  require(n > 0, Err::DegenerateLabels, "no evaluable task at this step");
  return sum / static_cast<double>(n);
}

struct TrialSetup {
  TaskStream stream;
  std::map<std::string, TaskData> train, test;
  std::size_t d = 0;
  std::size_t t_max = 0;
};

TrialSetup prepare_trial(const ExperimentConfig& cfg, const TaskTable& tasks,
                         const SplitFn& split, int trial, TrialOutput& out) {
  TrialSetup setup;
  {
    Log stream_log;
    setup.stream = make_streams(tasks, cfg, trial, &stream_log);
    if (trial == 0)
      for (auto& line : stream_log.lines) out.note(line);
  }
  setup.t_max = setup.stream.t_max();
  for (const auto& row : setup.stream.per_agent) {
    for (const auto& id : row) {
      auto [tr, te] = split(tasks.at(id), trial);
      setup.d = tr.dim();
      setup.train.emplace(id, std::move(tr));
      setup.test.emplace(id, std::move(te));
    }
  }
  for (const auto& [id, data] : setup.train)
    require(data.dim() == setup.d, Err::InconsistentWidth,
            "task '" + id + "' feature dimension differs");
  return setup;
}

// Shared driver for the two online methods. CoLLA runs K(t) ADMM iterations
// per step over the graph; ELLA (edgeless) updates each agent independently.
TrialOutput online_trial(const ExperimentConfig& cfg, const TaskTable& tasks,
                         const NetworkGraph* graph, const SplitFn& split,
                         int trial) {
  TrialOutput out;
  TrialSetup setup = prepare_trial(cfg, tasks, split, trial, out);
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);
  const std::size_t u = static_cast<std::size_t>(cfg.u);

  const Matrix l0 = init_dictionary(
      setup.d, u, mix_seed(cfg.stream_seed, static_cast<std::uint64_t>(trial), kDictInitTag));
  std::vector<AgentState> agents(n);
  std::vector<Matrix> dicts(n, l0);
  std::vector<const AccumulatorState*> acc_ptrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].agent_id = static_cast<int>(i);
    agents[i].acc = AccumulatorState(setup.d, u);
    agents[i].kb = l0;
    acc_ptrs[i] = &agents[i].acc;
  }
  DualVariable duals;
  if (graph) duals = DualVariable::zeros(*graph, setup.d, u);

  Matrix mean_prev = l0;
  out.curve.resize(setup.t_max);
  out.consensus.assign(setup.t_max, 0.0);
  out.drift.resize(setup.t_max);

  for (std::size_t t = 1; t <= setup.t_max; ++t) {
    std::vector<std::string> new_ids(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& id = setup.stream.per_agent[i][t - 1];
      new_ids[i] = id;
      try {
        TaskEncoding enc = fit_task(setup.train.at(id), cfg.ridge_reg);
        SparseCode code = solve_weighted_lasso(dicts[i], enc, cfg.mu);
        if (!code.converged)
          out.note("MaxIterReached coding task '" + id + "' (flagged)");
        accumulate_task(agents[i].acc, code, enc);
        agents[i].codes.emplace(id, std::move(code));
        agents[i].encodings.emplace(id, std::move(enc));
      } catch (const Error& e) {
        rethrow_with_context(e, static_cast<int>(t), static_cast<int>(i));
      }
    }

    if (graph) {
      if (t == 1 && trial == 0) {
        const RhoCheck check =
            rho_admissibility(*graph, acc_ptrs, cfg.lambda, cfg.rho);
        if (!check.ok)
          out.note("rho=" + fmt_g17(cfg.rho) +
                   " outside the admissible bound " + fmt_g17(check.bound) +
                   "; running anyway");
      }
      AdmmOptions opt;
      opt.rho = cfg.rho;
      opt.lambda = cfg.lambda;
      opt.iterations = cfg.k_schedule.at(static_cast<int>(t));
      const ConsensusTrace trace =
          admm_consensus_round(*graph, acc_ptrs, dicts, duals, opt);
      out.consensus[t - 1] = trace.residuals.back();
    } else {
      for (std::size_t i = 0; i < n; ++i)
        dicts[i] = ella_update(agents[i].acc, cfg.lambda);
    }
    for (std::size_t i = 0; i < n; ++i) agents[i].kb = dicts[i];

    std::map<std::string, double> per_task;
    out.curve[t - 1] =
        average_seen_metric(agents, dicts, setup.test, out, &per_task);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = per_task.find(new_ids[i]);
      if (it != per_task.end()) out.first_eval[new_ids[i]] = it->second;
    }
    if (t == setup.t_max) out.final_metrics = per_task;

    const Matrix mean_now = mean_dict(dicts);
    out.drift[t - 1] = fro_dist(mean_now, mean_prev);
    mean_prev = mean_now;
  }
  return out;
}

TrialOutput stl_trial(const ExperimentConfig& cfg, const TaskTable& tasks,
                      const SplitFn& split, int trial) {
  TrialOutput out;
  TrialSetup setup = prepare_trial(cfg, tasks, split, trial, out);
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);

  out.curve.resize(setup.t_max);
  out.consensus.assign(setup.t_max, 0.0);
  out.drift.assign(setup.t_max, 0.0);

  double running_sum = 0.0;
  std::size_t running_n = 0;
  for (std::size_t t = 1; t <= setup.t_max; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& id = setup.stream.per_agent[i][t - 1];
      try {
        const TaskEncoding enc = fit_task(setup.train.at(id), cfg.ridge_reg);
        double metric;
        try {
          metric = metric_for_task(enc.alpha, setup.test.at(id));
        } catch (const Error& e) {
          if (e.code() != Err::DegenerateLabels) throw;
          out.note("task '" + id + "' excluded: " + e.message());
          continue;
        }
        out.first_eval[id] = metric;
        out.final_metrics[id] = metric;
        running_sum += metric;
        ++running_n;
      } catch (const Error& e) {
        rethrow_with_context(e, static_cast<int>(t), static_cast<int>(i));
      }
    }
    require(running_n > 0, Err::DegenerateLabels, "no evaluable task yet");
    out.curve[t - 1] = running_sum / static_cast<double>(running_n);
  }
  return out;
}

constexpr double kBatchRelTol = 1e-6;
constexpr int kBatchMaxAlternations = 200;

TrialOutput gomtl_trial(const ExperimentConfig& cfg, const TaskTable& tasks,
                        const SplitFn& split, int trial) {
  TrialOutput out;
  TrialSetup setup = prepare_trial(cfg, tasks, split, trial, out);
  const std::size_t u = static_cast<std::size_t>(cfg.u);

  std::vector<std::string> ids;
  for (const auto& row : setup.stream.per_agent)
    ids.insert(ids.end(), row.begin(), row.end());
  std::sort(ids.begin(), ids.end());

  std::map<std::string, TaskEncoding> encs;
  for (const auto& id : ids)
    encs.emplace(id, fit_task(setup.train.at(id), cfg.ridge_reg));

  Matrix dict = init_dictionary(
      setup.d, u, mix_seed(cfg.stream_seed, static_cast<std::uint64_t>(trial), kDictInitTag));
  std::map<std::string, SparseCode> codes;

  double prev_obj = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int alt = 0; alt < kBatchMaxAlternations; ++alt) {
    // (a) per-task codes given the dictionary, warm-started
    AccumulatorState acc(setup.d, u);
    for (const auto& id : ids) {
      LassoOptions opts;
      const auto prev = codes.find(id);
      if (prev != codes.end()) opts.warm_start = &prev->second.s;
      SparseCode code = solve_weighted_lasso(dict, encs.at(id), cfg.mu, opts);
      accumulate_task(acc, code, encs.at(id));
      codes.insert_or_assign(id, std::move(code));
    }
    // (b) closed-form dictionary given all codes
    dict = ella_update(acc, cfg.lambda);

    std::vector<std::pair<const TaskEncoding*, const SparseCode*>> pairs;
    for (const auto& id : ids) pairs.emplace_back(&encs.at(id), &codes.at(id));
    const double obj = pooled_objective(pairs, dict, cfg.mu, cfg.lambda);
    if (std::fabs(prev_obj - obj) <= kBatchRelTol * std::max(1.0, std::fabs(prev_obj))) {
      converged = true;
      break;
    }
    prev_obj = obj;
  }
  if (!converged) {
    out.flagged = true;
    out.note("gomtl: NoConvergence after " +
             std::to_string(kBatchMaxAlternations) +
             " alternations (best iterate returned, flagged)");
  }

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& id : ids) {
    const Vec theta = matvec(dict, codes.at(id).s);
    double metric;
    try {
      metric = metric_for_task(theta, setup.test.at(id));
    } catch (const Error& e) {
      if (e.code() != Err::DegenerateLabels) throw;
      out.note("task '" + id + "' excluded: " + e.message());
      continue;
    }
    out.first_eval[id] = metric;
    out.final_metrics[id] = metric;
    sum += metric;
    ++count;
  }
  require(count > 0, Err::DegenerateLabels, "no evaluable task");
  out.curve.assign(setup.t_max, sum / static_cast<double>(count));
  out.consensus.assign(setup.t_max, 0.0);
  out.drift.assign(setup.t_max, 0.0);
  return out;
}

TrialOutput offline_colla_trial(const ExperimentConfig& cfg,
                                const TaskTable& tasks,
                                const NetworkGraph& graph, const SplitFn& split,
                                int trial) {
  TrialOutput out;
  TrialSetup setup = prepare_trial(cfg, tasks, split, trial, out);
  const std::size_t n = static_cast<std::size_t>(cfg.n_agents);
  const std::size_t u = static_cast<std::size_t>(cfg.u);

  const Matrix l0 = init_dictionary(
      setup.d, u, mix_seed(cfg.stream_seed, static_cast<std::uint64_t>(trial), kDictInitTag));
  std::vector<AgentState> agents(n);
  std::vector<Matrix> dicts(n, l0);
  std::vector<const AccumulatorState*> acc_ptrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].agent_id = static_cast<int>(i);
    agents[i].kb = l0;
    acc_ptrs[i] = &agents[i].acc;
    for (const auto& id : setup.stream.per_agent[i])
      agents[i].encodings.emplace(id,
                                  fit_task(setup.train.at(id), cfg.ridge_reg));
  }
  DualVariable duals = DualVariable::zeros(graph, setup.d, u);

  double prev_obj = std::numeric_limits<double>::infinity();
  bool converged = false;
  double final_residual = 0.0;
  for (int alt = 0; alt < kBatchMaxAlternations; ++alt) {
    // (a) re-code all tasks against the owning agent's dictionary
    for (std::size_t i = 0; i < n; ++i) {
      agents[i].acc = AccumulatorState(setup.d, u);
      for (const auto& id : setup.stream.per_agent[i]) {
        LassoOptions opts;
        const auto prev = agents[i].codes.find(id);
        if (prev != agents[i].codes.end()) opts.warm_start = &prev->second.s;
        SparseCode code =
            solve_weighted_lasso(dicts[i], agents[i].encodings.at(id), cfg.mu, opts);
        accumulate_task(agents[i].acc, code, agents[i].encodings.at(id));
        agents[i].codes.insert_or_assign(id, std::move(code));
      }
    }
    // (b) consensus rounds to convergence on the fixed codes
    AdmmOptions opt;
    opt.rho = cfg.rho;
    opt.lambda = cfg.lambda;
    opt.iterations = 500;
    opt.stop_below = 1e-8;
    const ConsensusTrace trace =
        admm_consensus_round(graph, acc_ptrs, dicts, duals, opt);
    final_residual = trace.residuals.back();

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<const TaskEncoding*, const SparseCode*>> pairs;
      for (const auto& id : setup.stream.per_agent[i])
        pairs.emplace_back(&agents[i].encodings.at(id), &agents[i].codes.at(id));
      obj += pooled_objective(pairs, dicts[i], cfg.mu, cfg.lambda);
    }
    if (std::fabs(prev_obj - obj) <= kBatchRelTol * std::max(1.0, std::fabs(prev_obj))) {
      converged = true;
      break;
    }
    prev_obj = obj;
  }
  if (!converged) {
    out.flagged = true;
    out.note("offline_colla: NoConvergence after " +
             std::to_string(kBatchMaxAlternations) + " alternations (flagged)");
  }
  for (std::size_t i = 0; i < n; ++i) agents[i].kb = dicts[i];

  std::map<std::string, double> per_task;
  const double avg = average_seen_metric(agents, dicts, setup.test, out, &per_task);
  out.first_eval = per_task;
  out.final_metrics = per_task;
  out.curve.assign(setup.t_max, avg);
  out.consensus.assign(setup.t_max, final_residual);
  out.drift.assign(setup.t_max, 0.0);
  return out;
}

void parallel_trials(int n_trials, int threads,
                     const std::function<void(int)>& body) {
  if (threads <= 1 || n_trials <= 1) {
    for (int r = 0; r < n_trials; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const int workers = std::min(threads, n_trials);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= n_trials) break;
        {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (first_error) break;
        }
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

TaskKind table_kind(const TaskTable& tasks) {
  require(!tasks.empty(), Err::EmptyInput, "no tasks");
  const TaskKind kind = tasks.begin()->second.kind;
  for (const auto& [id, data] : tasks)
    require(data.kind == kind, Err::InconsistentWidth,
            "mixed task kinds in one experiment");
  return kind;
}

ExperimentResult assemble(TaskKind kind, std::vector<TrialOutput>& outputs,
                          Log* log) {
  const std::size_t n_trials = outputs.size();
  const std::size_t t_max = outputs.front().curve.size();
  ExperimentResult res;
  res.kind = kind;
  res.metrics = Matrix(n_trials, t_max);
  res.consensus = Matrix(n_trials, t_max);
  res.drift = Matrix(n_trials, t_max);
  res.first_eval.resize(n_trials);
  res.final_metrics.resize(n_trials);
  for (std::size_t r = 0; r < n_trials; ++r) {
    TrialOutput& o = outputs[r];
    require(o.curve.size() == t_max, Err::DimensionMismatch,
            "trial curve lengths differ");
    for (std::size_t t = 0; t < t_max; ++t) {
      res.metrics(r, t) = o.curve[t];
      res.consensus(r, t) = o.consensus[t];
      res.drift(r, t) = o.drift[t];
    }
    res.first_eval[r] = std::move(o.first_eval);
    res.final_metrics[r] = std::move(o.final_metrics);
    res.flagged_no_convergence |= o.flagged;
    if (log)
      for (auto& line : o.notes)
        log->note("trial " + std::to_string(r) + ": " + line);
  }
  require(res.metrics.all_finite() && res.consensus.all_finite() &&
              res.drift.all_finite(),
          Err::SolveFailure, "experiment produced non-finite metrics");
  return res;
}

using TrialFn = std::function<TrialOutput(int)>;

ExperimentResult drive(const ExperimentConfig& cfg, const TaskTable& tasks,
                       const TrialFn& trial_fn, int threads, Log* log) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(cfg.n_trials));
  parallel_trials(cfg.n_trials, threads,
                  [&](int r) { outputs[static_cast<std::size_t>(r)] = trial_fn(r); });
  ExperimentResult res = assemble(table_kind(tasks), outputs, log);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return res;
}

}  // namespace

ExperimentResult run_method_with_splits(const ExperimentConfig& cfg,
                                        const TaskTable& tasks,
                                        const SplitFn& split, int threads,
                                        Log* log) {
  cfg.validate();
  switch (cfg.method) {
    case Method::CoLLA: {
      const NetworkGraph graph =
          make_topology(cfg.topology, cfg.n_agents, cfg.topology_seed);
      return drive(cfg, tasks,
                   [&](int r) { return online_trial(cfg, tasks, &graph, split, r); },
                   threads, log);
    }
    case Method::ELLA:
      return drive(cfg, tasks,
                   [&](int r) { return online_trial(cfg, tasks, nullptr, split, r); },
                   threads, log);
    case Method::STL:
      return drive(cfg, tasks,
                   [&](int r) { return stl_trial(cfg, tasks, split, r); },
                   threads, log);
    case Method::GoMTL:
      return drive(cfg, tasks,
                   [&](int r) { return gomtl_trial(cfg, tasks, split, r); },
                   threads, log);
    case Method::OfflineCoLLA: {
      const NetworkGraph graph =
          make_topology(cfg.topology, cfg.n_agents, cfg.topology_seed);
      return drive(
          cfg, tasks,
          [&](int r) { return offline_colla_trial(cfg, tasks, graph, split, r); },
          threads, log);
    }
  }
  fail(Err::ConfigError, "unknown method");
}

ExperimentResult run_method(const ExperimentConfig& cfg, const TaskTable& tasks,
                            int threads, Log* log) {
  return run_method_with_splits(cfg, tasks, default_split_fn(cfg), threads, log);
}

namespace {

ExperimentResult run_as(Method m, const ExperimentConfig& cfg,
                        const TaskTable& tasks, int threads, Log* log) {
  ExperimentConfig c = cfg;
  c.method = m;
  return run_method(c, tasks, threads, log);
}

}  // namespace

ExperimentResult run_colla(const ExperimentConfig& cfg, const TaskTable& tasks,
                           int threads, Log* log) {
  return run_as(Method::CoLLA, cfg, tasks, threads, log);
}
ExperimentResult run_ella(const ExperimentConfig& cfg, const TaskTable& tasks,
                          int threads, Log* log) {
  return run_as(Method::ELLA, cfg, tasks, threads, log);
}
ExperimentResult run_stl(const ExperimentConfig& cfg, const TaskTable& tasks,
                         int threads, Log* log) {
  return run_as(Method::STL, cfg, tasks, threads, log);
}
ExperimentResult run_gomtl(const ExperimentConfig& cfg, const TaskTable& tasks,
                           int threads, Log* log) {
  return run_as(Method::GoMTL, cfg, tasks, threads, log);
}
ExperimentResult run_offline_colla(const ExperimentConfig& cfg,
                                   const TaskTable& tasks, int threads,
                                   Log* log) {
  return run_as(Method::OfflineCoLLA, cfg, tasks, threads, log);
}

ExperimentConfig grid_search(const ExperimentConfig& tmpl,
                             const TaskTable& tasks, const GridSpec& grid,
                             const ValidationSpec& val, int threads, Log* log,
                             std::vector<GridCellScore>* scores) {
  require(!grid.u.empty() && !grid.lambda.empty() && !grid.mu.empty() &&
              !grid.rho.empty(),
          Err::ConfigError, "grid_search: empty grid");
  require(val.n_trials >= 1, Err::ConfigError, "validation trials must be >= 1");
  require(val.carve_fraction > 0.0 && val.carve_fraction < 1.0,
          Err::ConfigError, "carve fraction must be in (0,1)");

  // Grids iterated ascending so that ties resolve toward the simplest model.
  GridSpec g = grid;
  std::sort(g.u.begin(), g.u.end());
  std::sort(g.lambda.begin(), g.lambda.end());
  std::sort(g.mu.begin(), g.mu.end());
  std::sort(g.rho.begin(), g.rho.end());

  std::vector<ExperimentConfig> cells;
  for (int u : g.u)
    for (double lambda : g.lambda)
      for (double mu : g.mu)
        for (double rho : g.rho) {
          ExperimentConfig c = tmpl;
          c.u = u;
          c.lambda = lambda;
          c.mu = mu;
          c.rho = rho;
          c.n_trials = val.n_trials;
          cells.push_back(c);
        }

  // Validation provider: carve val.carve_fraction out of each training split.
  const SplitFn base_split = default_split_fn(tmpl);
  const double keep = 1.0 - val.carve_fraction;
  const std::uint64_t carve_seed = mix_seed(tmpl.split_seed, 0xca54e);
  const SplitFn grid_split = [base_split, keep, carve_seed](
                                 const TaskData& data, int trial) {
    auto [train, ignored_test] = base_split(data, trial);
    const SplitSpec spec{
        mix_seed(mix_seed(carve_seed, static_cast<std::uint64_t>(trial)),
                 fnv1a(data.task_id)),
        keep};
    return split_task(train, spec);
  };

  std::vector<double> cell_scores(cells.size());
  parallel_trials(static_cast<int>(cells.size()), threads, [&](int c) {
    const ExperimentConfig& cfg = cells[static_cast<std::size_t>(c)];
    const ExperimentResult res =
        run_method_with_splits(cfg, tasks, grid_split, 1, nullptr);
    double acc = 0.0;
    for (const auto& per_task : res.final_metrics) {
      double s = 0.0;
      for (const auto& [id, metric] : per_task) s += oriented(metric, res.kind);
      acc += s / static_cast<double>(per_task.size());
    }
    cell_scores[static_cast<std::size_t>(c)] =
        acc / static_cast<double>(res.n_trials());
  });

  std::size_t best = 0;
  for (std::size_t c = 1; c < cells.size(); ++c)
    if (cell_scores[c] > cell_scores[best]) best = c;
  if (scores)
    for (std::size_t c = 0; c < cells.size(); ++c)
      scores->push_back(GridCellScore{cells[c], cell_scores[c]});
  if (log)
    log->note("grid_search: best cell u=" + std::to_string(cells[best].u) +
              " lambda=" + fmt_g17(cells[best].lambda) + " mu=" +
              fmt_g17(cells[best].mu) + " rho=" + fmt_g17(cells[best].rho));

  ExperimentConfig bestcfg = cells[best];
  bestcfg.n_trials = tmpl.n_trials;
  return bestcfg;
}

}  // namespace colla

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "colla/consensus_net.hpp"
#include "colla/evaluation.hpp"
#include "colla/knowledge_base.hpp"
#include "colla/util.hpp"

// Experiment drivers. One trial is single-threaded (the Gauss-Seidel sweep
// order is semantically significant); trials are independent and fan out to a
// worker pool, merged by trial index so results are identical at any thread
// count.

namespace colla {

using TaskTable = std::map<std::string, TaskData>;

enum class Method { CoLLA, ELLA, STL, GoMTL, OfflineCoLLA };

Method method_from_string(const std::string& s);
const char* method_to_string(Method m) noexcept;

// K(t) = k1 + ceil(k2 / t): heavy consensus effort early, decaying as the
// local dictionaries align.
struct KSchedule {
  int k1 = 5;
  int k2 = 45;
  int at(int t) const { return k1 + (k2 + t - 1) / t; }
};

struct ExperimentConfig {
  Method method = Method::CoLLA;
  int u = 4;
  double lambda = 1e-2;
  double mu = 1e-1;
  double rho = 1.0;
  double ridge_reg = 1e-3;
  TopologyKind topology = TopologyKind::Chain;
  int n_agents = 1;
  KSchedule k_schedule;
  int n_trials = 10;
  double split_fraction = 0.5;
  bool shuffle_tasks = true;
  std::uint64_t split_seed = 1;
  std::uint64_t stream_seed = 2;
  std::uint64_t topology_seed = 3;

  void validate() const;
};

// Per-agent ordered task ids; equal length across agents (synchrony), no task
// assigned twice.
struct TaskStream {
  std::vector<std::vector<std::string>> per_agent;

  std::size_t t_max() const noexcept {
    return per_agent.empty() ? 0 : per_agent.front().size();
  }
  void validate() const;
};

// Tasks are distributed equally among the agents; the remainder is dropped
// (noted in the log) to keep the streams equal length.
TaskStream make_streams(const TaskTable& tasks, const ExperimentConfig& cfg,
                        int trial, Log* log = nullptr);

struct AgentState {
  int agent_id = 0;
  AccumulatorState acc;
  KnowledgeBase kb;
  std::map<std::string, SparseCode> codes;
  std::map<std::string, TaskEncoding> encodings;
};

// Per-task train/test provider; the default splits with the config's
// split_seed. grid_search substitutes one that carves a validation set out of
// the training half.
using SplitFn =
    std::function<std::pair<TaskData, TaskData>(const TaskData&, int trial)>;

SplitFn default_split_fn(const ExperimentConfig& cfg);

// Online CoLLA over the configured topology (Algorithm-1 flow: fit, code,
// accumulate, then K(t) ADMM iterations per time step).
ExperimentResult run_colla(const ExperimentConfig& cfg, const TaskTable& tasks,
                           int threads = 1, Log* log = nullptr);
// ELLA: no communication. With n_agents > 1 this is the edgeless-CoLLA
// baseline (independent single-agent learners on the same streams).
ExperimentResult run_ella(const ExperimentConfig& cfg, const TaskTable& tasks,
                          int threads = 1, Log* log = nullptr);
// Independent per-task fits; no dictionary, the jumpstart baseline.
ExperimentResult run_stl(const ExperimentConfig& cfg, const TaskTable& tasks,
                         int threads = 1, Log* log = nullptr);
// Batch alternating optimization with a single centralized dictionary.
ExperimentResult run_gomtl(const ExperimentConfig& cfg, const TaskTable& tasks,
                           int threads = 1, Log* log = nullptr);
// Batch distributed variant: alternates re-coding with ADMM consensus.
ExperimentResult run_offline_colla(const ExperimentConfig& cfg,
                                   const TaskTable& tasks, int threads = 1,
                                   Log* log = nullptr);

// Dispatch on cfg.method.
ExperimentResult run_method(const ExperimentConfig& cfg, const TaskTable& tasks,
                            int threads = 1, Log* log = nullptr);

// Same, with an explicit split provider (grid search internals).
ExperimentResult run_method_with_splits(const ExperimentConfig& cfg,
                                        const TaskTable& tasks,
                                        const SplitFn& split, int threads = 1,
                                        Log* log = nullptr);

// (1/n) sum_tasks [ ||alpha - L s||^2_Gamma + mu ||s||_1 ] + lambda ||L||_F^2
double pooled_objective(
    const std::vector<std::pair<const TaskEncoding*, const SparseCode*>>& tasks,
    const Matrix& dict, double mu, double lambda);

// Deterministic dictionary initialization: unit-norm gaussian columns. All
// agents of a trial share one draw.
Matrix init_dictionary(std::size_t d, std::size_t u, std::uint64_t seed);

struct GridSpec {
  std::vector<int> u;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> rho;
};

struct ValidationSpec {
  int n_trials = 3;
  double carve_fraction = 0.2;  // share of each training split held out
};

struct GridCellScore {
  ExperimentConfig config;
  double score = 0.0;  // oriented, higher is better
};

// Brute-force search over the grid; each cell is scored on validation sets
// carved from the training halves. Ties break toward smaller u, then smaller
// lambda (then mu, rho).
ExperimentConfig grid_search(const ExperimentConfig& tmpl,
                             const TaskTable& tasks, const GridSpec& grid,
                             const ValidationSpec& val, int threads = 1,
                             Log* log = nullptr,
                             std::vector<GridCellScore>* scores = nullptr);

}  // namespace colla

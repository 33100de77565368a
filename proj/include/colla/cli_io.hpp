#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colla/simulator.hpp"

// The artifact's user-facing surface: dataset ingestion, flat key-value
// config files, experiment orchestration, and plot-ready CSV emission.
// Emitted files use LF line endings, no trailing separators, and 17
// significant digit floats, so a config snapshot plus the dataset files
// reproduce a run byte for byte.

namespace colla {

namespace fs = std::filesystem;

struct DatasetManifest {
  std::string name;
  TaskKind kind = TaskKind::Regression;
  std::vector<fs::path> data_files;  // resolved relative to the manifest
  int d = 0;                         // feature count before bias augmentation
  bool add_bias = false;
};

// Flat key-value text file: name, kind (regression|classification), d,
// add_bias, and one or more `data = <csv>` lines.
DatasetManifest load_manifest(const fs::path& path);

// CSV format: header `task_id,y,f1,...,fd`, one row per instance, UTF-8,
// '.' decimal separator. Rows are grouped by task_id; a constant 1.0 bias
// column is appended when the manifest asks for it.
TaskTable ingest_csv(const DatasetManifest& manifest);

// Canonical re-export (used by `ingest --out` and the round-trip tests):
// data.csv plus a manifest.txt with add_bias=false and d = current width.
void export_dataset(const TaskTable& tasks, const std::string& name,
                    const fs::path& out_dir);

struct SynthSpec {
  int d = 8;
  int u_true = 4;
  int n_tasks = 40;
  int n_agents = 2;
  int instances_per_task = 20;
  double noise_sd = 0.1;
  int sparsity = 2;
  std::uint64_t seed = 0;
  std::string name = "synth";
};

struct SynthResult {
  TaskTable tasks;
  DatasetManifest manifest;
  Matrix truth_dictionary;                // d x u_true, unit-norm columns
  std::map<std::string, Vec> truth_codes;  // task_id -> s*, length u_true
};

// y = X^T (L* s*) + noise. Throws BadSpec on inconsistent parameters.
SynthResult synth_generate(const SynthSpec& spec);
// Same, plus CSV + manifest + ground-truth files under out_dir.
SynthResult synth_generate_files(const SynthSpec& spec, const fs::path& out_dir);
SynthSpec load_synth_spec(const fs::path& path);

struct RunConfig {
  ExperimentConfig exp;
  fs::path dataset_manifest;  // absolute
};

// Parses a run config; optional seed block file overrides the three named
// seeds. Throws ConfigError / ParseError.
RunConfig load_run_config(const fs::path& config_path,
                          const std::optional<fs::path>& seed_block = {});

void write_snapshot(const RunConfig& cfg, const fs::path& path);

struct RunArtifact {
  RunConfig config;
  fs::path out_dir;
  fs::path curves_csv;   // trial,t,metric_mean,consensus_residual,dict_drift
  fs::path summary_csv;  // t,metric_mean,metric_stderr
  fs::path snapshot;     // resolved config, reproduces the run byte-exactly
  fs::path log_file;
};

RunArtifact run_experiment(const fs::path& config_path, const fs::path& out_dir,
                           int threads = 1,
                           const std::optional<fs::path>& seed_block = {});

// Paired multi-config comparison. All configs must share dataset, trial
// count, splits and streams (same seed block); throws UnpairedConfigs
// otherwise. Emits a long-format CSV `method,series,t,value` with series
// metric_mean / metric_stderr per step and one jumpstart row per method when
// an STL config is in the list.
fs::path compare_runs(const std::vector<fs::path>& config_paths,
                      const fs::path& out_dir, int threads = 1,
                      const std::optional<fs::path>& seed_block = {});

// Grid search driven by grid_* keys in the config (defaults to the
// {10^n | -6 <= n <= 6} grids and u in {1..max(10, T/4)} when absent).
// Emits grid_scores.csv and best_config.txt; returns the best config path.
fs::path run_grid(const fs::path& config_path, const fs::path& out_dir,
                  int threads = 1,
                  const std::optional<fs::path>& seed_block = {});

// Dataset summary line for the `ingest` verb.
std::string dataset_summary(const DatasetManifest& manifest,
                            const TaskTable& tasks);

}  // namespace colla

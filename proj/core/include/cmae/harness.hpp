#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmae/config.hpp"
#include "cmae/env.hpp"
#include "cmae/learner.hpp"

namespace cmae {

// One evaluation checkpoint: frozen target policies run greedily for a fixed
// number of episodes in a separate environment instance.
struct EvalRecord {
  uint64_t env_step = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  std::vector<double> episode_returns;
  std::vector<uint8_t> episode_success;
};

struct FinalMetric {
  double success_rate = 0.0;
  double mean_return = 0.0;
};

// Flat mean over the per-episode outcomes of the last ten evaluation
// records. Throws InsufficientData with fewer than ten records.
FinalMetric final_metric(std::span<const EvalRecord> records);

struct EvalOutcome {
  std::vector<double> episode_returns;
  std::vector<uint8_t> episode_success;
  double mean_return = 0.0;
  double success_rate = 0.0;
};

// Greedy decentralized execution of the given per-agent tables.
EvalOutcome evaluate_policies(Env& env, std::span<const QTable> tables, int episodes,
                              uint64_t eval_seed);

struct RunArtifacts {
  uint64_t seed = 0;
  std::vector<EvalRecord> records;
  std::vector<std::string> snapshot_paths;
  std::string metrics_path;
  uint64_t env_steps = 0;
  uint64_t episodes = 0;
};

// Trains one seed per the configured algorithm and writes that seed's
// artifacts (metrics CSV, goal log, tree summary, counters, snapshots) when
// an output directory is configured.
RunArtifacts run_training(const RunConfig& cfg, uint64_t seed);

// All configured seeds, `cfg.parallel` at a time, plus the cross-seed
// aggregate CSV. Artifacts are returned in seed order.
std::vector<RunArtifacts> run_training_all(const RunConfig& cfg);

struct AbsoluteMetric {
  double mean_return = 0.0;
  double success_rate = 0.0;
  int best_index = -1;
};

// Evaluates every snapshot for `episodes` fresh episodes and reports the
// best snapshot's mean episode return.
AbsoluteMetric absolute_metric(const std::vector<std::vector<QTable>>& snapshots, Env& env,
                               int episodes = 100, uint64_t eval_seed = 0x9e11);
AbsoluteMetric absolute_metric_from_files(const std::vector<std::string>& paths, Env& env,
                                          int episodes = 100);

}  // namespace cmae

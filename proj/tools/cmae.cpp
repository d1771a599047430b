// Command line front end: train / eval / claims / dump-visits.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cmae/analysis.hpp"
#include "cmae/harness.hpp"
#include "cmae/snapshot.hpp"

namespace {

using namespace cmae;

struct TrainFlags {
  std::string task, reward_mode, algo, seeds, config, out;
  uint64_t steps = 0;
  int parallel = 0;
};

RunConfig build_config(const TrainFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = parse_config_file(f.config, cfg);
  // Flags override file values.
  if (!f.task.empty()) cfg.task = task_from_string(f.task);
  if (!f.reward_mode.empty()) cfg.reward_mode = reward_mode_from_string(f.reward_mode);
  if (!f.algo.empty()) cfg.algo = algo_from_string(f.algo);
  if (!f.seeds.empty()) cfg.seeds = parse_seed_list(f.seeds);
  if (f.steps > 0) cfg.total_env_steps = f.steps;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.parallel > 0) cfg.parallel = f.parallel;
  cfg.validate();
  return cfg;
}

int cmd_train(const TrainFlags& flags) {
  const RunConfig cfg = build_config(flags);
  const auto runs = run_training_all(cfg);
  for (const auto& run : runs) {
    std::printf("seed=%llu steps=%llu episodes=%llu",
                static_cast<unsigned long long>(run.seed),
                static_cast<unsigned long long>(run.env_steps),
                static_cast<unsigned long long>(run.episodes));
    if (run.records.size() >= 10) {
      const FinalMetric m = final_metric(run.records);
      std::printf(" final_success=%.4f final_return=%.4f", m.success_rate, m.mean_return);
    }
    std::printf("\n");
  }
  if (!runs.empty() && runs.front().records.size() >= 10) {
    double s = 0.0, r = 0.0;
    for (const auto& run : runs) {
      const FinalMetric m = final_metric(run.records);
      s += m.success_rate;
      r += m.mean_return;
    }
    std::printf("mean_final_success=%.4f mean_final_return=%.4f seeds=%zu\n",
                s / runs.size(), r / runs.size(), runs.size());
  }
  if (!cfg.out_dir.empty()) std::printf("artifacts=%s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& task, const std::string& reward_mode,
             const std::string& run_dir, uint64_t seed,
             std::vector<std::string> snapshot_paths, int episodes) {
  if (!run_dir.empty()) {
    const std::string prefix = "snapshot_seed" + std::to_string(seed) + "_";
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind(prefix, 0) == 0 && entry.path().extension() == ".qt")
        snapshot_paths.push_back(entry.path().string());
    }
    std::sort(snapshot_paths.begin(), snapshot_paths.end());
  }
  if (snapshot_paths.empty()) throw ConfigError("eval: no snapshots found");

  auto env = make_env(make_task_spec(task_from_string(task),
                                     reward_mode_from_string(reward_mode)));
  const AbsoluteMetric m = absolute_metric_from_files(snapshot_paths, *env, episodes);
  std::printf("snapshots=%zu episodes=%d absolute_return=%.4f absolute_success=%.4f best=%s\n",
              snapshot_paths.size(), episodes, m.mean_return, m.success_rate,
              snapshot_paths[m.best_index].c_str());
  return 0;
}

int cmd_claims(int trials, int l_max, uint64_t seed) {
  Rng rng(seed);

  std::printf("# coverage of all m = l^2 joint action configurations\n");
  std::printf("%-3s %-4s %-12s %-14s %-12s %-8s\n", "l", "m", "shared_mean",
              "nonshared_mean", "closed_form", "rel_err");
  for (int l = 2; l <= l_max; ++l) {
    const auto shared = simulate_coverage(l, true, std::max(1, trials / 100), rng);
    const auto unshared = simulate_coverage(l, false, trials, rng);
    const double closed = coupon_collector_expectation(l * l);
    std::printf("%-3d %-4d %-12.4f %-14.4f %-12.4f %-8.4f\n", l, l * l,
                shared.mean_steps, unshared.mean_steps, closed,
                std::abs(unshared.mean_steps - closed) / closed);
  }

  std::printf("\n# discovery of the maximal payoff when it depends on one agent\n");
  std::printf("%-3s %-10s %-9s %-7s %-10s %-10s %-14s\n", "l", "sub_mean", "sub_max",
              "bound", "full_adv", "expected", "full_rand_mean");
  for (int l = 2; l <= l_max; ++l) {
    std::vector<double> rows(l);
    for (int i = 0; i < l; ++i) rows[i] = static_cast<double>((i * 7 + 3) % l);
    const PayoffTable payoff = PayoffTable::row_constant(rows);
    const auto sub = simulate_restricted_discovery(payoff, DiscoveryMode::kSub, trials, rng);
    const auto adv =
        simulate_restricted_discovery(payoff, DiscoveryMode::kFullAdversarial, 1, rng);
    const auto rnd =
        simulate_restricted_discovery(payoff, DiscoveryMode::kFullRandom, trials, rng);
    std::printf("%-3d %-10.4f %-9.0f %-7d %-10.0f %-10d %-14.4f\n", l, sub.mean_steps,
                sub.max_steps, 2 * l, adv.mean_steps, l * l - l + 1, rnd.mean_steps);
  }
  return 0;
}

int cmd_dump_visits(const std::string& in, const std::string& space,
                    const std::string& out_path) {
  const CounterDump dump = load_counters(in);
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot write " + out_path);
    os = &file;
  }

  if (space.empty()) {
    for (const auto& node : dump.nodes)
      *os << node.k.to_string() << '\t' << node.entries.size() << " keys\n";
    return 0;
  }

  const IndexSet k = IndexSet::parse(space);
  const StatePacker packer(dump.cardinalities);
  for (const auto& node : dump.nodes) {
    if (!(node.k == k)) continue;
    std::vector<int> sub_cards;
    for (int i = 0; i < k.size(); ++i) sub_cards.push_back(dump.cardinalities[k[i]]);
    const StatePacker sub(sub_cards);
    for (const auto& [key, count] : node.entries) {
      const auto comps = sub.unpack(key);
      for (size_t i = 0; i < comps.size(); ++i) {
        if (i) *os << ':';
        *os << comps[i];
      }
      *os << '\t' << count << '\n';
    }
    return 0;
  }
  throw ConfigError("dump-visits: no counter for space " + space);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated multi-agent exploration on discrete gridworld tasks"};
  app.require_subcommand(1);

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train one task with one algorithm");
  train_cmd->add_option("--task", train.task, "pass|secret-room|push-box|island|matrix-game");
  train_cmd->add_option("--reward-mode", train.reward_mode, "sparse|dense");
  train_cmd->add_option("--algo", train.algo, "cmae|qlearn|qlearn-bonus");
  train_cmd->add_option("--seeds", train.seeds, "comma-separated seed list");
  train_cmd->add_option("--steps", train.steps, "environment step budget");
  train_cmd->add_option("--config", train.config, "key=value config file");
  train_cmd->add_option("--out", train.out, "artifact output directory");
  train_cmd->add_option("--parallel", train.parallel, "seeds trained concurrently");

  std::string eval_task = "pass", eval_mode = "sparse", eval_run;
  uint64_t eval_seed = 1;
  std::vector<std::string> eval_snapshots;
  int eval_episodes = 100;
  auto* eval_cmd = app.add_subcommand("eval", "Absolute metric of saved snapshots");
  eval_cmd->add_option("--task", eval_task, "task name");
  eval_cmd->add_option("--reward-mode", eval_mode, "sparse|dense");
  eval_cmd->add_option("--run", eval_run, "training output directory to scan");
  eval_cmd->add_option("--seed", eval_seed, "seed whose snapshots to evaluate");
  eval_cmd->add_option("--snapshot", eval_snapshots, "explicit snapshot files");
  eval_cmd->add_option("--episodes", eval_episodes, "evaluation episodes per snapshot");

  int claims_trials = 100000, claims_lmax = 6;
  uint64_t claims_seed = 12345;
  auto* claims_cmd = app.add_subcommand("claims", "Matrix-game exploration analysis");
  claims_cmd->add_option("--trials", claims_trials, "Monte Carlo trials");
  claims_cmd->add_option("--lmax", claims_lmax, "largest per-agent action count");
  claims_cmd->add_option("--seed", claims_seed, "Monte Carlo seed");

  std::string dump_in, dump_space, dump_out;
  auto* dump_cmd = app.add_subcommand("dump-visits", "Export visitation counts");
  dump_cmd->add_option("--in", dump_in, "counters .bin file from a training run")->required();
  dump_cmd->add_option("--space", dump_space, "component indices, e.g. 0,1");
  dump_cmd->add_option("--out", dump_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd)
      return cmd_eval(eval_task, eval_mode, eval_run, eval_seed, eval_snapshots,
                      eval_episodes);
    if (*claims_cmd) return cmd_claims(claims_trials, claims_lmax, claims_seed);
    if (*dump_cmd) return cmd_dump_visits(dump_in, dump_space, dump_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

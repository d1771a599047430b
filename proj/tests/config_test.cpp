#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cmae/config.hpp"

using namespace cmae;

namespace {

std::string write_temp(const std::string& contents) {
  static int counter = 0;
  const std::string path = "/tmp/cmae_config_test_" + std::to_string(counter++) + ".cfg";
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("defaults validate") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.effective_eval_interval() == 30000);
  CHECK(cfg.effective_alpha_horizon() == 2'000'000);
  CHECK(cfg.task_spec().grid_size == 30);
}

TEST_CASE("config file entries override defaults") {
  const std::string path = write_temp(
      "# comment line\n"
      "task = push-box\n"
      "reward_mode = dense\n"
      "algo = qlearn-bonus\n"
      "seeds = 3, 5, 8\n"
      "steps = 1000\n"
      "goal_period=2\n"
      "expand_period=4\n"
      "gamma = 0.9   # trailing comment\n"
      "\n"
      "bonus_beta = 50\n");
  const RunConfig cfg = parse_config_file(path);
  CHECK(cfg.task == Task::kPushBox);
  CHECK(cfg.reward_mode == RewardMode::kDense);
  CHECK(cfg.algo == Algo::kQlearnBonus);
  CHECK(cfg.seeds == std::vector<uint64_t>{3, 5, 8});
  CHECK(cfg.total_env_steps == 1000);
  CHECK(cfg.goal_period == 2);
  CHECK(cfg.expand_period == 4);
  CHECK(cfg.gamma == doctest::Approx(0.9));
  CHECK(cfg.bonus_beta == doctest::Approx(50.0));
  CHECK_NOTHROW(cfg.validate());
  std::remove(path.c_str());
}

TEST_CASE("unknown keys and malformed lines are configuration errors") {
  const std::string bad_key = write_temp("no_such_option = 1\n");
  CHECK_THROWS_AS(parse_config_file(bad_key), ConfigError);
  std::remove(bad_key.c_str());

  const std::string bad_line = write_temp("task push-box\n");
  CHECK_THROWS_AS(parse_config_file(bad_line), ConfigError);
  std::remove(bad_line.c_str());

  const std::string bad_int = write_temp("steps = soon\n");
  CHECK_THROWS_AS(parse_config_file(bad_int), ConfigError);
  std::remove(bad_int.c_str());

  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("validation rejects inconsistent configurations") {
  RunConfig cfg;

  cfg.expand_period = 15;  // not a multiple of goal_period = 10
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = RunConfig{};
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = RunConfig{};
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = RunConfig{};
  cfg.goal_period = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = RunConfig{};
  cfg.replay_capacity = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = RunConfig{};
  cfg.task = Task::kMatrixGame;
  cfg.matrix_actions = 7;  // beyond the table-backed action limit
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("seed list parsing") {
  CHECK(parse_seed_list("1,2,3") == std::vector<uint64_t>{1, 2, 3});
  CHECK(parse_seed_list(" 42 ") == std::vector<uint64_t>{42});
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("a,b"), ConfigError);
}

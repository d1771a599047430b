#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "cmae/explore.hpp"

using namespace cmae;

namespace {

TransitionRecord transition_into(const EnvState& s, const EnvState& s2, double reward,
                                 bool done, int a0 = 0, int a1 = 0) {
  TransitionRecord t;
  t.state = s;
  t.joint_obs = JointObs::full_state(s, 2);
  t.joint_action = JointAction{a0, a1};
  t.next_state = s2;
  t.next_joint_obs = JointObs::full_state(s2, 2);
  t.reward = reward;
  t.done = done;
  return t;
}

EnvState random_state(Rng& rng, const std::vector<int>& cards) {
  EnvState s;
  for (int card : cards) s.push_back(static_cast<int>(rng.below(card)));
  return s;
}

}  // namespace

TEST_CASE("goal selection returns the least-counted projection in the batch") {
  const std::vector<int> cards{8, 8};
  SpaceTree tree(cards, 2);
  ReplayBuffer replay(64);

  SUBCASE("a single stored state is always the goal") {
    const EnvState only{3, 4};
    replay.push(transition_into(EnvState{0, 0}, only, 0.0, false));
    tree.update_all(only);
    Rng rng(5);
    const auto goal = select_goal(tree, replay, rng, 1, 1.0);
    REQUIRE(goal.has_value());
    CHECK(goal->full_state == only);
    CHECK(goal->bonus == 1.0);
  }

  SUBCASE("unique minimum count wins") {
    // Component 0 varies so the singleton space {0} has finite utility; the
    // value 7 appears once, everything else five times.
    Rng rng(6);
    for (int v : {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 7}) {
      const EnvState s{v, 0};
      replay.push(transition_into(EnvState{0, 0}, s, 0.0, false));
      tree.update_all(s);
    }
    // Batch large enough that the frozen seed surely samples the rare state.
    const auto goal = select_goal(tree, replay, rng, 256, 0.5);
    REQUIRE(goal.has_value());
    CHECK(goal->full_state[0] == 7);
    // Matches the exhaustive scan over all stored states.
    uint64_t best = ~0ull;
    replay.for_each_next_state([&](const EnvState& s) {
      const int id = tree.find(goal->k);
      best = std::min(best, tree.node(id).counter.count(tree.project_key(s, goal->k)));
    });
    const int id = tree.find(goal->k);
    CHECK(tree.node(id).counter.count(goal->key) == best);
  }

  SUBCASE("empty replay yields no goal") {
    Rng rng(7);
    CHECK_FALSE(select_goal(tree, replay, rng, 8, 1.0).has_value());
  }
}

TEST_CASE("selected goals always exist in the replay buffer") {
  const std::vector<int> cards{6, 6, 6};
  SpaceTree tree(cards, 3);
  ReplayBuffer replay(512);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const EnvState s2 = random_state(rng, cards);
    replay.push(transition_into(random_state(rng, cards), s2, 0.0, false));
    tree.update_all(s2);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto goal = select_goal(tree, replay, rng, 64, 1.0);
    REQUIRE(goal.has_value());
    bool found = false;
    replay.for_each_next_state([&](const EnvState& s) { found = found || s == goal->full_state; });
    CHECK(found);
    CHECK(tree.project_key(goal->full_state, goal->k) == goal->key);
  }
}

TEST_CASE("reward reshaping touches exactly the matched transitions") {
  const std::vector<int> cards{5, 5};
  SpaceTree tree(cards, 2);
  Rng rng(13);

  std::vector<TransitionRecord> batch;
  for (int i = 0; i < 100; ++i) {
    const EnvState s = random_state(rng, cards);
    batch.push_back(transition_into(s, random_state(rng, cards), rng.real01(), false));
    tree.update_all(batch.back().next_state);
  }

  Goal goal;
  goal.k = IndexSet{0};
  goal.full_state = EnvState{2, 3};
  goal.key = tree.project_key(goal.full_state, goal.k);
  goal.bonus = 1.0;

  double original_sum = 0.0;
  int matches = 0;
  for (const auto& t : batch) {
    original_sum += t.reward;
    if (t.state[0] == 2) ++matches;  // independent match count
  }

  const auto reshaped = reshape_rewards(batch, goal, tree, GoalMatchMode::kRestricted);
  double reshaped_sum = 0.0;
  for (size_t i = 0; i < reshaped.size(); ++i) {
    reshaped_sum += reshaped[i].reward;
    const bool matched = batch[i].state[0] == 2;
    CHECK(reshaped[i].reward ==
          doctest::Approx(batch[i].reward + (matched ? 1.0 : 0.0)));
  }
  CHECK(reshaped_sum == doctest::Approx(original_sum + 1.0 * matches));

  // Input batch untouched.
  double after = 0.0;
  for (const auto& t : batch) after += t.reward;
  CHECK(after == doctest::Approx(original_sum));

  // No goal: verbatim copy.
  const auto plain = reshape_rewards(batch, std::nullopt, tree, GoalMatchMode::kRestricted);
  for (size_t i = 0; i < plain.size(); ++i)
    CHECK(plain[i].reward == batch[i].reward);
}

TEST_CASE("full-state matching is stricter than restricted matching") {
  const std::vector<int> cards{5, 5};
  SpaceTree tree(cards, 2);
  Goal goal;
  goal.k = IndexSet{0};
  goal.full_state = EnvState{2, 3};
  goal.key = tree.project_key(goal.full_state, goal.k);

  const EnvState same_projection{2, 4};
  CHECK(goal_matches(goal, tree, same_projection, GoalMatchMode::kRestricted));
  CHECK_FALSE(goal_matches(goal, tree, same_projection, GoalMatchMode::kFull));
  CHECK(goal_matches(goal, tree, goal.full_state, GoalMatchMode::kFull));
}

TEST_CASE("exploration updates apply the bonus to matched transitions only") {
  const std::vector<int> cards{5, 5};
  SpaceTree tree(cards, 2);
  const StatePacker packer(cards);
  std::vector<QTable> policies;
  policies.emplace_back(5, 0.1, 0.95);
  policies.emplace_back(5, 0.1, 0.95);

  Goal goal;
  goal.k = IndexSet{0};
  goal.full_state = EnvState{2, 3};
  goal.key = tree.project_key(goal.full_state, goal.k);
  goal.bonus = 1.0;

  SUBCASE("matched terminal transition earns step * (r + bonus)") {
    const auto t = transition_into(EnvState{2, 3}, EnvState{3, 3}, 0.0, true, 4, 1);
    exploration_update(policies, packer, t, goal, tree, GoalMatchMode::kRestricted);
    CHECK(policies[0].q(packer.pack(t.state), 4) == doctest::Approx(0.1));
    CHECK(policies[1].q(packer.pack(t.state), 1) == doctest::Approx(0.1));
  }

  SUBCASE("zero bonus degenerates to the raw update") {
    Goal zero = goal;
    zero.bonus = 0.0;
    const auto t = transition_into(EnvState{2, 3}, EnvState{3, 3}, 0.0, true, 4, 1);
    exploration_update(policies, packer, t, zero, tree, GoalMatchMode::kRestricted);
    CHECK(policies[0].q(packer.pack(t.state), 4) == 0.0);
  }

  SUBCASE("unmatched transition trains on the raw reward") {
    const auto t = transition_into(EnvState{4, 3}, EnvState{3, 3}, 0.0, true, 2, 2);
    exploration_update(policies, packer, t, goal, tree, GoalMatchMode::kRestricted);
    CHECK(policies[0].q(packer.pack(t.state), 2) == 0.0);
  }
}

TEST_CASE("batch exploration training is a no-op on an empty buffer") {
  const std::vector<int> cards{5, 5};
  SpaceTree tree(cards, 2);
  const StatePacker packer(cards);
  std::vector<QTable> policies;
  policies.emplace_back(5, 0.1, 0.95);
  policies.emplace_back(5, 0.1, 0.95);
  ReplayBuffer replay(16);
  Rng rng(3);
  train_exploration(policies, packer, replay, std::nullopt, tree,
                    GoalMatchMode::kRestricted, rng, 32);
  CHECK(policies[0].size() == 0);
  CHECK(policies[1].size() == 0);
}

TEST_CASE("replay buffer is bounded FIFO with stable global indices") {
  ReplayBuffer replay(4);
  for (int i = 0; i < 10; ++i)
    replay.push(transition_into(EnvState{i % 5, 0}, EnvState{(i + 1) % 5, 0},
                                static_cast<double>(i), false));
  CHECK(replay.size() == 4);
  CHECK(replay.begin_index() == 6);
  CHECK(replay.end_index() == 10);
  for (uint64_t g = replay.begin_index(); g < replay.end_index(); ++g)
    CHECK(replay.at_global(g).reward == doctest::Approx(static_cast<double>(g)));
  CHECK_THROWS_AS(replay.at_global(5), ContractViolation);
  CHECK_THROWS_AS(replay.at_global(10), ContractViolation);

  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const uint64_t g = replay.sample_index(rng);
    CHECK(g >= replay.begin_index());
    CHECK(g < replay.end_index());
  }
}

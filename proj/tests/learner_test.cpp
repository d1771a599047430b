#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <unordered_map>

#include "cmae/learner.hpp"

using namespace cmae;

namespace {

TransitionRecord make_transition(const EnvState& s, int a0, int a1, const EnvState& s2,
                                 double reward, bool done) {
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

}  // namespace

TEST_CASE("flat map behaves like a reference map under random churn") {
  FlatQMap map;
  std::unordered_map<uint64_t, float> oracle;
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    const uint64_t key = rng.below(5000);
    const float v = static_cast<float>(rng.real01());
    map.get_or_insert(key)[2] = v;
    oracle[key] = v;
  }
  CHECK(map.size() == oracle.size());
  for (const auto& [key, v] : oracle) {
    const auto* found = map.find(key);
    REQUIRE(found != nullptr);
    CHECK((*found)[2] == v);
  }
  CHECK(map.find(999999) == nullptr);
}

TEST_CASE("single backup arithmetic") {
  QTable q(5, 0.05, 0.95);
  const EnvState s{1, 2};
  const EnvState s2{1, 3};
  const StatePacker packer({10, 10});

  SUBCASE("terminal transition with reward 1 moves Q by one step size") {
    q_update(q, packer, make_transition(s, 3, 0, s2, 1.0, true), 0);
    CHECK(q.q(packer.pack(s), 3) == doctest::Approx(0.05));
  }

  SUBCASE("zero TD error leaves the table untouched") {
    q_update(q, packer, make_transition(s, 3, 0, s2, 0.0, false), 0);
    CHECK(q.q(packer.pack(s), 3) == 0.0);
    CHECK(q.size() == 1);  // entry exists, still zero
  }

  SUBCASE("reward override replaces the stored reward") {
    q_update(q, packer, make_transition(s, 2, 0, s2, 0.0, true), 0, 1.0);
    CHECK(q.q(packer.pack(s), 2) == doctest::Approx(0.05));
  }

  SUBCASE("bootstrap uses the max over next-state actions") {
    const uint64_t next = packer.pack(s2);
    q.update(next, 4, 1.0, next, true);  // plant Q(s2,4) = step
    const double planted = q.q(next, 4);
    q_update(q, packer, make_transition(s, 1, 0, s2, 0.0, false), 0);
    CHECK(q.q(packer.pack(s), 1) == doctest::Approx(0.05 * 0.95 * planted));
  }
}

TEST_CASE("two sequential backups match a hand-rolled chain") {
  QTable q(2, 0.1, 0.9);
  const StatePacker packer({4});
  const EnvState sa{0}, sb{1};
  const auto t1 = make_transition(sb, 0, 0, sb, 1.0, true);
  const auto t2 = make_transition(sa, 1, 0, sb, 0.0, false);

  q_update(q, packer, t1, 0);
  q_update(q, packer, t2, 0);
  q_update(q, packer, t1, 0);
  q_update(q, packer, t2, 0);

  // Same arithmetic tracked independently in float, mirroring table storage.
  float qb = 0.0f, qa = 0.0f;
  qb = static_cast<float>(qb + 0.1 * (1.0 - qb));
  qa = static_cast<float>(qa + 0.1 * (0.0 + 0.9 * qb - qa));
  qb = static_cast<float>(qb + 0.1 * (1.0 - qb));
  qa = static_cast<float>(qa + 0.1 * (0.0 + 0.9 * qb - qa));

  CHECK(q.q(packer.pack(sb), 0) == doctest::Approx(qb).epsilon(1e-12));
  CHECK(q.q(packer.pack(sa), 1) == doctest::Approx(qa).epsilon(1e-12));
}

TEST_CASE("Q-learning converges to the value-iteration fixed point") {
  // Deterministic 2-state, 2-action MDP:
  //   s0: a0 -> s0 r=0.1       s1: a0 -> s0 r=1.0
  //       a1 -> s1 r=0.0           a1 -> s1 r=0.0
  const double gamma = 0.9;
  struct Arc { int next; double r; };
  const Arc mdp[2][2] = {{{0, 0.1}, {1, 0.0}}, {{0, 1.0}, {1, 0.0}}};

  // Independent oracle: value iteration to the fixed point.
  double vstar[2] = {0.0, 0.0};
  for (int it = 0; it < 10000; ++it) {
    double next[2];
    for (int s = 0; s < 2; ++s) {
      next[s] = -1e18;
      for (int a = 0; a < 2; ++a)
        next[s] = std::max(next[s], mdp[s][a].r + gamma * vstar[mdp[s][a].next]);
    }
    vstar[0] = next[0];
    vstar[1] = next[1];
  }
  double qstar[2][2];
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a) qstar[s][a] = mdp[s][a].r + gamma * vstar[mdp[s][a].next];

  QTable q(2, 0.1, gamma);
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const int s = static_cast<int>(rng.below(2));
    const int a = static_cast<int>(rng.below(2));
    q.update(s, a, mdp[s][a].r, mdp[s][a].next, false);
  }
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      CHECK(q.q(s, a) == doctest::Approx(qstar[s][a]).epsilon(1e-3));
}

TEST_CASE("mixture schedule is linear and exactly zero past the horizon") {
  const MixtureSchedule sched{1.0, 1000};
  CHECK(sched.alpha(0) == 1.0);
  CHECK(sched.alpha(500) == doctest::Approx(0.5));
  CHECK(sched.alpha(999) > 0.0);
  CHECK(sched.alpha(1000) == 0.0);
  CHECK(sched.alpha(123456) == 0.0);
  for (uint64_t t = 1; t < 1000; t += 7) CHECK(sched.alpha(t) <= sched.alpha(t - 1));
}

TEST_CASE("mixture acting selects the right policy branch") {
  // Exploration tables prefer action 0, target tables prefer action 1.
  std::vector<QTable> explo, target;
  for (int i = 0; i < 2; ++i) {
    explo.emplace_back(5, 0.1, 0.9);
    target.emplace_back(5, 0.1, 0.9);
    explo.back().update(0, 0, 1.0, 0, true);
    target.back().update(0, 1, 1.0, 0, true);
  }
  const MixtureSchedule sched{1.0, 1000};
  Rng rng(12);

  SUBCASE("t = 0: exploration policies always act") {
    for (int i = 0; i < 200; ++i) {
      const JointAction a = act_mixture(explo, target, 0, 0, sched, 0.0, rng);
      CHECK(a[0] == 0);
      CHECK(a[1] == 0);
    }
  }

  SUBCASE("t >= horizon: target policies always act") {
    for (int i = 0; i < 200; ++i) {
      const JointAction a = act_mixture(explo, target, 0, 1000, sched, 0.0, rng);
      CHECK(a[0] == 1);
      CHECK(a[1] == 1);
    }
  }

  SUBCASE("alpha = 0.5 splits the branches evenly") {
    int explore_hits = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      const JointAction a = act_mixture(explo, target, 0, 500, sched, 0.0, rng);
      if (a[0] == 0) ++explore_hits;
    }
    CHECK(std::abs(explore_hits / static_cast<double>(draws) - 0.5) < 0.01);
  }

  SUBCASE("residual noise anneals with alpha") {
    // Past the horizon alpha is 0, so epsilon contributes nothing.
    for (int i = 0; i < 200; ++i) {
      const JointAction a = act_mixture(explo, target, 0, 2000, sched, 0.5, rng);
      CHECK(a[0] == 1);
    }
  }
}

TEST_CASE("epsilon-greedy frequencies") {
  std::vector<QTable> tables;
  tables.emplace_back(5, 0.1, 0.9);
  tables.emplace_back(5, 0.1, 0.9);
  tables[0].update(0, 2, 1.0, 0, true);  // unique argmax: action 2
  tables[1].update(0, 2, 1.0, 0, true);
  Rng rng(9);

  SUBCASE("epsilon = 0 is deterministic greedy") {
    for (int i = 0; i < 100; ++i) {
      const JointAction a = act_epsilon_greedy(tables, 0, 0.0, rng);
      CHECK(a[0] == 2);
      CHECK(a[1] == 2);
    }
  }

  SUBCASE("epsilon = 1 is uniform over joint actions") {
    const int draws = 100000;
    std::array<int, 25> hist{};
    for (int i = 0; i < draws; ++i) {
      const JointAction a = act_epsilon_greedy(tables, 0, 1.0, rng);
      ++hist[a[0] * 5 + a[1]];
    }
    for (int j = 0; j < 25; ++j)
      CHECK(std::abs(hist[j] / static_cast<double>(draws) - 0.04) < 0.01);
  }

  SUBCASE("epsilon = 0.2 takes the random branch at the right rate") {
    // P(action != 2) = eps * 4/5.
    const int draws = 100000;
    int off_greedy = 0;
    for (int i = 0; i < draws; ++i) {
      const JointAction a = act_epsilon_greedy(tables, 0, 0.2, rng);
      if (a[0] != 2) ++off_greedy;
    }
    CHECK(std::abs(off_greedy / static_cast<double>(draws) - 0.16) < 0.01);
  }
}

TEST_CASE("greedy ties break uniformly at random") {
  QTable q(4, 0.1, 0.9);
  q.update(0, 1, 1.0, 0, true);
  q.update(0, 3, 1.0, 0, true);  // same value as action 1
  Rng rng(21);
  int ones = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const int a = q.greedy_action(0, rng);
    CHECK((a == 1 || a == 3));
    if (a == 1) ++ones;
  }
  CHECK(std::abs(ones / static_cast<double>(draws) - 0.5) < 0.01);
}

TEST_CASE("count bonus examples") {
  Counter c;
  CHECK(count_bonus_reward(c, 5, 1.0) == doctest::Approx(1.0));  // unseen counts as one
  c.increment(5);
  CHECK(count_bonus_reward(c, 5, 1.0) == doctest::Approx(1.0));
  for (int i = 0; i < 3; ++i) c.increment(5);
  CHECK(count_bonus_reward(c, 5, 1.0) == doctest::Approx(0.5));  // 1/sqrt(4)
  CHECK(count_bonus_reward(c, 5, 0.0) == 0.0);
  CHECK(count_bonus_reward(c, 5, 10.0) == doctest::Approx(5.0));
}

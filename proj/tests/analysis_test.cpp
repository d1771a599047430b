#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmae/analysis.hpp"

using namespace cmae;

TEST_CASE("shared-goal coverage takes exactly m steps, every trial") {
  Rng rng(1);
  for (int l = 2; l <= 10; ++l) {
    const auto res = simulate_coverage(l, /*shared=*/true, 200, rng);
    const double m = static_cast<double>(l * l);
    CHECK(res.mean_steps == m);
    CHECK(res.min_steps == m);
    CHECK(res.max_steps == m);
  }
}

TEST_CASE("uncoordinated coverage matches the coupon-collector closed form") {
  Rng rng(2);

  SUBCASE("l = 2: mean near 4 * (1 + 1/2 + 1/3 + 1/4)") {
    const auto res = simulate_coverage(2, false, 100000, rng);
    CHECK(coupon_collector_expectation(4) == doctest::Approx(25.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(res.mean_steps - coupon_collector_expectation(4)) /
              coupon_collector_expectation(4) <
          0.02);
  }

  SUBCASE("l = 3: mean near 9 * H_9 = 25.4607") {
    const auto res = simulate_coverage(3, false, 100000, rng);
    CHECK(coupon_collector_expectation(9) == doctest::Approx(25.4607).epsilon(1e-4));
    CHECK(std::abs(res.mean_steps - coupon_collector_expectation(9)) /
              coupon_collector_expectation(9) <
          0.02);
  }

  SUBCASE("three standard errors for l in 2..5") {
    // Coupon-collector variance is bounded by m^2 * pi^2 / 6.
    for (int l = 2; l <= 5; ++l) {
      const int m = l * l;
      const int trials = 40000;
      const auto res = simulate_coverage(l, false, trials, rng);
      const double se = std::sqrt(m * m * M_PI * M_PI / 6.0 / trials);
      CHECK(std::abs(res.mean_steps - coupon_collector_expectation(m)) < 3 * se);
    }
  }
}

TEST_CASE("coverage speedup grows with the configuration count") {
  Rng rng(3);
  double last_ratio = 0.0;
  for (int l = 2; l <= 10; ++l) {
    const auto shared = simulate_coverage(l, true, 50, rng);
    const auto unshared = simulate_coverage(l, false, 20000, rng);
    const double ratio = unshared.mean_steps / shared.mean_steps;
    CHECK(ratio > last_ratio);
    last_ratio = ratio;
  }
}

TEST_CASE("per-agent sweeps discover the maximal payoff within 2l steps") {
  Rng rng(4);
  for (int l = 2; l <= 8; ++l) {
    std::vector<double> rows(l);
    for (int i = 0; i < l; ++i) rows[i] = i == l / 2 ? 1.0 : 0.1 * i / l;
    const PayoffTable payoff = PayoffTable::row_constant(rows);
    const auto res = simulate_restricted_discovery(payoff, DiscoveryMode::kSub, 5000, rng);
    CHECK(res.max_steps <= 2.0 * l);
    CHECK(res.mean_steps <= 2.0 * l);
    CHECK(res.mean_steps >= 1.0);
  }
}

TEST_CASE("l = 2 with the maximum in agent-one's action 0 finds it within 4 steps") {
  Rng rng(5);
  const PayoffTable payoff = PayoffTable::row_constant({1.0, 0.2});
  const auto res = simulate_restricted_discovery(payoff, DiscoveryMode::kSub, 2000, rng);
  CHECK(res.max_steps <= 4.0);
}

TEST_CASE("adversarial full sweeps need exactly l*l - l + 1 steps") {
  Rng rng(6);
  for (int l = 2; l <= 8; ++l) {
    std::vector<double> rows(l, 0.0);
    rows[l - 1] = 2.0;
    const PayoffTable payoff = PayoffTable::row_constant(rows);
    const auto res =
        simulate_restricted_discovery(payoff, DiscoveryMode::kFullAdversarial, 10, rng);
    const double expect = static_cast<double>(l * l - l + 1);
    CHECK(res.mean_steps == expect);
    CHECK(res.max_steps == expect);
  }
}

TEST_CASE("random full sweeps match the order-statistic expectation") {
  // First success position when l winners hide among m slots: (m+1)/(l+1).
  Rng rng(7);
  const int l = 4;
  std::vector<double> rows(l, 0.0);
  rows[1] = 1.0;
  const PayoffTable payoff = PayoffTable::row_constant(rows);
  const auto res =
      simulate_restricted_discovery(payoff, DiscoveryMode::kFullRandom, 100000, rng);
  const double expect = (l * l + 1.0) / (l + 1.0);
  CHECK(std::abs(res.mean_steps - expect) / expect < 0.02);
}

TEST_CASE("malformed payoff tables are rejected") {
  Rng rng(8);
  CHECK_THROWS_AS(
      simulate_restricted_discovery(PayoffTable::identity(3), DiscoveryMode::kSub, 10, rng),
      ContractViolation);
  CHECK_THROWS_AS(simulate_coverage(0, true, 10, rng), ContractViolation);
  CHECK_THROWS_AS(simulate_coverage(2, true, 0, rng), ContractViolation);
}

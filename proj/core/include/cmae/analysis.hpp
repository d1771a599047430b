#pragma once

#include <string>

#include "cmae/env.hpp"
#include "cmae/rng.hpp"

namespace cmae {

struct CoverageResult {
  double mean_steps = 0.0;
  double min_steps = 0.0;
  double max_steps = 0.0;
};

// Steps until all m = l*l joint action configurations of a cooperative
// 2-player l-action game are seen at least once.
//
// Without a shared goal each step draws one configuration uniformly at
// random. With a shared goal the least-visited configuration is enumerated
// as the target each step, so a new configuration is visited every step and
// completion takes exactly m steps.
CoverageResult simulate_coverage(int l, bool shared, int trials, Rng& rng);

// Closed-form coupon-collector expectation m * sum_{i=1..m} 1/i.
double coupon_collector_expectation(int m);

enum class DiscoveryMode { kSub, kFullAdversarial, kFullRandom };

DiscoveryMode discovery_mode_from_string(const std::string& name);

struct DiscoveryResult {
  double mean_steps = 0.0;
  double max_steps = 0.0;
};

// Steps until the maximal payoff of a row-constant table (payoff depends
// only on agent one's action) is first observed.
//
// kSub sweeps the 2l per-agent configurations (each agent's actions with the
// partner fixed) in random order: at most 2l steps. kFullAdversarial sweeps
// all l*l joint configurations with every maximal configuration placed last:
// exactly l*l - l + 1 steps. kFullRandom sweeps the joint configurations in
// random order.
DiscoveryResult simulate_restricted_discovery(const PayoffTable& payoff,
                                              DiscoveryMode mode, int trials, Rng& rng);

}  // namespace cmae

#include "cmae/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "cmae/error.hpp"

namespace cmae {

namespace {

void shuffle(std::vector<int>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

CoverageResult simulate_coverage(int l, bool shared, int trials, Rng& rng) {
  if (l < 1) throw ContractViolation("simulate_coverage: l must be >= 1");
  if (trials < 1) throw ContractViolation("simulate_coverage: trials must be >= 1");
  const int m = l * l;

  double sum = 0.0;
  double min_steps = std::numeric_limits<double>::infinity();
  double max_steps = 0.0;
  std::vector<uint32_t> counts(m);

  for (int trial = 0; trial < trials; ++trial) {
    std::fill(counts.begin(), counts.end(), 0);
    int seen = 0;
    uint64_t steps = 0;
    while (seen < m) {
      int config;
      if (shared) {
        // Coordinated play: the least-visited configuration is the shared
        // goal and gets executed directly.
        config = 0;
        for (int c = 1; c < m; ++c)
          if (counts[c] < counts[config]) config = c;
      } else {
        config = static_cast<int>(rng.below(static_cast<uint64_t>(m)));
      }
      if (counts[config]++ == 0) ++seen;
      ++steps;
    }
    sum += static_cast<double>(steps);
    min_steps = std::min(min_steps, static_cast<double>(steps));
    max_steps = std::max(max_steps, static_cast<double>(steps));
  }
  return {sum / trials, min_steps, max_steps};
}

double coupon_collector_expectation(int m) {
  double h = 0.0;
  for (int i = 1; i <= m; ++i) h += 1.0 / i;
  return m * h;
}

DiscoveryMode discovery_mode_from_string(const std::string& name) {
  if (name == "sub") return DiscoveryMode::kSub;
  if (name == "full" || name == "full-adversarial") return DiscoveryMode::kFullAdversarial;
  if (name == "full-random") return DiscoveryMode::kFullRandom;
  throw ConfigError("unknown discovery mode: " + name);
}

DiscoveryResult simulate_restricted_discovery(const PayoffTable& payoff,
                                              DiscoveryMode mode, int trials, Rng& rng) {
  if (trials < 1) throw ContractViolation("simulate_restricted_discovery: trials must be >= 1");
  if (!payoff.rows_constant())
    throw ContractViolation("simulate_restricted_discovery: payoff must depend only on agent one");
  const int l = payoff.actions;
  const double v_max = payoff.max_value();

  // Probe sequences are index lists; each probe resolves to a joint action.
  const auto probe_payoff = [&](int probe, bool sub) {
    if (!sub) return payoff.at(probe / l, probe % l);
    // First l probes sweep agent one (partner fixed at 0), the rest sweep
    // agent two (agent one fixed at 0).
    return probe < l ? payoff.at(probe, 0) : payoff.at(0, probe - l);
  };

  const bool sub = mode == DiscoveryMode::kSub;
  const int n_probes = sub ? 2 * l : l * l;

  std::vector<int> order(n_probes);
  std::iota(order.begin(), order.end(), 0);
  if (mode == DiscoveryMode::kFullAdversarial) {
    // Worst case: every maximal configuration goes last.
    std::stable_partition(order.begin(), order.end(),
                          [&](int p) { return probe_payoff(p, false) != v_max; });
  }

  double sum = 0.0;
  double max_steps = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    if (mode != DiscoveryMode::kFullAdversarial) shuffle(order, rng);
    int steps = n_probes;
    for (int i = 0; i < n_probes; ++i) {
      if (probe_payoff(order[i], sub) == v_max) {
        steps = i + 1;
        break;
      }
    }
    sum += steps;
    max_steps = std::max(max_steps, static_cast<double>(steps));
  }
  return {sum / trials, max_steps};
}

}  // namespace cmae

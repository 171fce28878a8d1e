#include <cmath>

#include "tailreg/errors.hpp"
#include "tailreg/harness.hpp"

namespace tailreg::harness {
namespace {

struct Enumerator {
  double p[2];
  const policy::KlUcb& policy;
  std::int64_t horizon;
  std::vector<double>& law;

  // Plays t, t+1, ..., horizon from `state`, reached with probability `weight`.
  void descend(const policy::PolicyState& state, std::int64_t t, double weight) {
    if (weight == 0.0) return;
    if (t > horizon) {
      law[static_cast<std::size_t>(state.count(1))] += weight;
      return;
    }
    const std::size_t arm = policy::select_arm(state, policy, t);
    for (int reward = 1; reward >= 0; --reward) {
      const double branch = reward == 1 ? p[arm] : 1.0 - p[arm];
      policy::PolicyState next = state;
      next.update(arm, static_cast<double>(reward));
      descend(next, t + 1, weight * branch);
    }
  }
};

}  // namespace

std::vector<double> exact_regret_distribution_bernoulli(
    double p1, double p2, const policy::DivergenceSpec& divergence,
    std::int64_t horizon) {
  if (horizon > 20) throw UsageError("exact enumeration is limited to T <= 20");
  if (horizon < 2) throw UsageError("exact enumeration needs T >= 2");
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw UsageError("exact enumeration: arm probabilities must lie in [0, 1]");
  }
  std::vector<double> law(static_cast<std::size_t>(horizon) + 1, 0.0);
  const policy::KlUcb policy(divergence);
  Enumerator walk{{p1, p2}, policy, horizon, law};
  walk.descend(policy::PolicyState(2), 1, 1.0);
  return law;
}

double exact_tail_bernoulli(double p1, double p2,
                            const policy::DivergenceSpec& divergence,
                            std::int64_t horizon, double x, EventKind event) {
  const auto law = exact_regret_distribution_bernoulli(p1, p2, divergence, horizon);
  double tail = 0.0;
  for (std::size_t n = 0; n < law.size(); ++n) {
    if (event_occurs(event, static_cast<std::int64_t>(n), x)) tail += law[n];
  }
  return tail;
}

}  // namespace tailreg::harness

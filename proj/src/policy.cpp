#include "tailreg/policy.hpp"

#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "tailreg/errors.hpp"

namespace tailreg::policy {
namespace {

constexpr double kGuard = expfam::kEndpointGuard;

double clamp_into(double mean, const expfam::Interval& domain) {
  if (std::isfinite(domain.lo) && mean < domain.lo + kGuard) return domain.lo + kGuard;
  if (std::isfinite(domain.hi) && mean > domain.hi - kGuard) return domain.hi - kGuard;
  return mean;
}

void require_b(double b) {
  if (!(b >= 0.0) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "robustness scale b must be non-negative, got " << b;
    throw UsageError(msg.str());
  }
}

void require_time(std::int64_t n, double t) {
  if (n < 1) throw UsageError("ucb index: pull count must be >= 1");
  if (!(t >= 1.0)) throw UsageError("ucb index: time must be >= 1");
}

// Largest u ≥ mean with div(mean, u) ≤ budget, by bisection. `div` is any
// callable that is increasing in u above `mean`.
template <class Divergence>
double bisect_upper(double mean, double budget, const expfam::Interval& domain,
                    double proxy_variance, const Divergence& div,
                    const IndexOptions& options) {
  double hi;
  if (std::isfinite(domain.hi)) {
    hi = domain.hi - kGuard;
    if (hi <= mean || div(mean, hi) <= budget) return std::max(hi, mean);
  } else {
    double offset = std::sqrt(2.0 * budget * proxy_variance) + 1.0;
    int doublings = 0;
    while (div(mean, mean + offset) <= budget) {
      offset *= 2.0;
      if (++doublings > 1000) {
        throw NumericError("ucb index: could not bracket the index", offset);
      }
    }
    hi = mean + offset;
  }
  // Bisect until the bracket collapses to adjacent doubles; the tolerance is
  // the accuracy that must be reached within the iteration cap.
  double lo = mean;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (div(mean, mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > options.tolerance) {
    throw NumericError("ucb index: bisection did not reach the tolerance", hi - lo);
  }
  return lo;
}

// Mean-parametrized KL in closed form for the index search; both arguments
// are already inside the mean-domain.
double family_kl_direct(const expfam::Family& f, double u, double v) {
  switch (f.kind()) {
    case expfam::Kind::GaussianKnownVar:
      return (u - v) * (u - v) / (2.0 * f.variance());
    case expfam::Kind::Bernoulli:
      return u * std::log(u / v) + (1.0 - u) * std::log((1.0 - u) / (1.0 - v));
    case expfam::Kind::Poisson:
      return u * std::log(u / v) - u + v;
    case expfam::Kind::Exponential: {
      const double r = u / v;
      return r - 1.0 - std::log(r);
    }
  }
  return 0.0;
}

double proxy_variance(const DivergenceSpec& div, double mean) {
  if (div.is_gaussian()) return div.family()->variance();
  return std::max(std::abs(mean), 1.0);
}

}  // namespace

DivergenceSpec DivergenceSpec::family_kl(const expfam::Family& family, double b) {
  require_b(b);
  DivergenceSpec spec;
  spec.family_ = family;
  spec.b_ = b;
  return spec;
}

DivergenceSpec DivergenceSpec::custom(CustomDivergence divergence, double b) {
  require_b(b);
  if (!divergence.fn) throw UsageError("custom divergence: no function given");
  const expfam::Interval d = divergence.domain;
  if (!(d.lo < d.hi)) throw UsageError("custom divergence: empty domain");
  // Probe window: the domain itself when finite, otherwise a unit-scale window.
  const double lo = std::isfinite(d.lo) ? d.lo : (std::isfinite(d.hi) ? d.hi - 20.0 : -10.0);
  const double hi = std::isfinite(d.hi) ? d.hi : lo + 20.0;
  constexpr int kGrid = 21;
  std::vector<double> grid;
  for (int i = 1; i <= kGrid; ++i) grid.push_back(lo + (hi - lo) * i / (kGrid + 1));
  const auto& fn = divergence.fn;
  for (double u : grid) {
    if (std::abs(fn(u, u)) > 1e-12) {
      throw UsageError("custom divergence: D(u, u) must be zero");
    }
    for (double v : grid) {
      if (u != v && !(fn(u, v) > 0.0)) {
        throw UsageError("custom divergence: D(u, v) must be positive for u != v");
      }
    }
  }
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    for (double other : grid) {
      const double second_first = fn(grid[i - 1], other) - 2.0 * fn(grid[i], other) +
                                  fn(grid[i + 1], other);
      const double second_second = fn(other, grid[i - 1]) - 2.0 * fn(other, grid[i]) +
                                   fn(other, grid[i + 1]);
      if (second_first < -1e-9 || second_second < -1e-9) {
        throw UsageError("custom divergence: not convex in each argument");
      }
    }
  }
  DivergenceSpec spec;
  spec.custom_ = std::move(divergence);
  spec.b_ = b;
  return spec;
}

expfam::Interval DivergenceSpec::domain() const noexcept {
  return family_ ? family_->mean_domain() : custom_->domain;
}

std::string DivergenceSpec::name() const {
  std::ostringstream out;
  if (family_) {
    out << "kl-" << family_->name();
    if (is_gaussian()) out << "(var=" << family_->variance() << ")";
  } else {
    out << custom_->name;
  }
  if (b_ != 0.0) out << "/(1+" << b_ << ")";
  return out.str();
}

double DivergenceSpec::base(double u, double v) const {
  if (family_) return expfam::kl_mean(*family_, u, v).nats;
  return custom_->fn(u, v);
}

DivergenceSpec DivergenceSpec::with_b(double b) const {
  require_b(b);
  DivergenceSpec copy = *this;
  copy.b_ = b;
  return copy;
}

DivergenceSpec robust_scale(const DivergenceSpec& div, double b) {
  require_b(b);
  if (b == 0.0) return div;
  return div.with_b((1.0 + div.b()) * (1.0 + b) - 1.0);
}

double subgaussian_enlargement(double variance, double b) {
  require_b(b);
  if (!(variance > 0.0)) throw UsageError("variance proxy must be positive");
  return variance * (1.0 + b);
}

double index_for_budget(double mean, double budget, const DivergenceSpec& div,
                        const IndexOptions& options) {
  const expfam::Interval domain = div.domain();
  const double m = clamp_into(mean, domain);
  if (!(budget > 0.0)) return m;
  if (div.is_gaussian() && !options.force_bisection) {
    return m + std::sqrt(2.0 * div.family()->variance() * budget);
  }
  if (const auto& family = div.family()) {
    return bisect_upper(
        m, budget, domain, proxy_variance(div, m),
        [&family](double u, double v) { return family_kl_direct(*family, u, v); }, options);
  }
  return bisect_upper(
      m, budget, domain, proxy_variance(div, m),
      [&div](double u, double v) { return div.base(u, v); }, options);
}

double ucb_index(double mean, std::int64_t n, double t, const DivergenceSpec& div,
                 const IndexOptions& options) {
  require_time(n, t);
  return index_for_budget(mean, div.scale() * std::log(t) / static_cast<double>(n),
                          div, options);
}

double ucb_index_scaled_divergence(double mean, std::int64_t n, double t,
                                   const DivergenceSpec& div,
                                   const IndexOptions& options) {
  require_time(n, t);
  const expfam::Interval domain = div.domain();
  const double m = clamp_into(mean, domain);
  const double budget = std::log(t) / static_cast<double>(n);
  if (!(budget > 0.0)) return m;
  if (div.is_gaussian() && !options.force_bisection) {
    // (u − μ̂)² / (2σ²(1+b)) = budget.
    return m + std::sqrt(2.0 * div.family()->variance() * div.scale() * budget);
  }
  const double scale = div.scale();
  if (const auto& family = div.family()) {
    return bisect_upper(
        m, budget, domain, proxy_variance(div, m) * scale,
        [&family, scale](double u, double v) { return family_kl_direct(*family, u, v) / scale; },
        options);
  }
  return bisect_upper(m, budget, domain, proxy_variance(div, m) * scale, div, options);
}

PolicyState::PolicyState(std::size_t arms)
    : counts_(arms, 0), sums_(arms, 0.0), compensation_(arms, 0.0), means_(arms, 0.0) {
  if (arms == 0) throw UsageError("policy state needs at least one arm");
}

void PolicyState::reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  std::fill(sums_.begin(), sums_.end(), 0.0);
  std::fill(compensation_.begin(), compensation_.end(), 0.0);
  std::fill(means_.begin(), means_.end(), 0.0);
  time_ = 0;
}

void PolicyState::update(std::size_t arm, double reward) {
  double& s = sums_[arm];
  const double t = s + reward;
  if (std::abs(s) >= std::abs(reward)) {
    compensation_[arm] += (s - t) + reward;
  } else {
    compensation_[arm] += (reward - t) + s;
  }
  s = t;
  ++counts_[arm];
  ++time_;
  means_[arm] = (s + compensation_[arm]) / static_cast<double>(counts_[arm]);
}

void PolicyState::set_arm(std::size_t arm, std::int64_t count, double mean) {
  counts_[arm] = count;
  sums_[arm] = mean * static_cast<double>(count);
  compensation_[arm] = 0.0;
  means_[arm] = count > 0 ? mean : 0.0;
  time_ = 0;
  for (auto c : counts_) time_ += c;
}

KlUcb::KlUcb(DivergenceSpec div)
    : div_(std::move(div)),
      gaussian_(div_.is_gaussian()),
      gaussian_factor_(gaussian_ ? 2.0 * div_.family()->variance() * div_.scale()
                                 : 0.0) {}

std::size_t select_arm(const PolicyState& state, const KlUcb& policy,
                       std::int64_t t) {
  const std::size_t arms = state.arms();
  if (t < 1) throw UsageError("select_arm: play number must be >= 1");
  if (t <= static_cast<std::int64_t>(arms)) return static_cast<std::size_t>(t - 1);
  const double log_t = std::log(static_cast<double>(t - 1));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < arms; ++k) {
    const double idx = policy.index(state.mean(k), state.count(k), log_t);
    if (idx > best_index) {
      best_index = idx;
      best = k;
    }
  }
  return best;
}

std::size_t select_arm(const PolicyState& state, const DivergenceSpec& div,
                       std::int64_t t) {
  return select_arm(state, KlUcb(div), t);
}

std::size_t ts_gaussian_select(const PolicyState& state, double variance,
                               std::int64_t t, rng::Stream& stream) {
  const std::size_t arms = state.arms();
  if (t < 1) throw UsageError("ts select: play number must be >= 1");
  if (t <= static_cast<std::int64_t>(arms)) return static_cast<std::size_t>(t - 1);
  boost::random::normal_distribution<double> normal;
  std::size_t best = 0;
  double best_draw = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < arms; ++k) {
    const double sd = std::sqrt(variance / static_cast<double>(state.count(k)));
    const double draw = state.mean(k) + sd * normal(stream);
    if (draw > best_draw) {
      best_draw = draw;
      best = k;
    }
  }
  return best;
}

}  // namespace tailreg::policy

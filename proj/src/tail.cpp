#include <cmath>

#include "tailreg/harness.hpp"

namespace tailreg::harness {
namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

WilsonInterval wilson_interval(std::int64_t hits, std::int64_t n) {
  const auto nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (hits == 0) ci.lo = 0.0;
  if (hits == n) ci.hi = 1.0;
  return ci;
}

TailEstimate make_tail_estimate(std::int64_t horizon, double threshold,
                                std::int64_t hits, std::int64_t reps,
                                double log_denominator) {
  TailEstimate e;
  e.horizon = horizon;
  e.threshold = threshold;
  e.hits = hits;
  e.reps = reps;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
  const WilsonInterval ci = wilson_interval(hits, reps);
  e.ci_lo = ci.lo;
  e.ci_hi = ci.hi;
  if (!(log_denominator > 0.0)) return e;
  if (hits == 0) {
    e.censored = true;
    e.censored_bound =
        std::min(0.0, std::log(3.0 / static_cast<double>(reps))) / log_denominator;
    return e;
  }
  e.exponent = std::log(e.p_hat) / log_denominator;
  e.exponent_ci_lo = std::log(ci.lo) / log_denominator;
  e.exponent_ci_hi = std::log(ci.hi) / log_denominator;
  return e;
}

std::vector<TailEstimate> estimates_from_hits(const ExperimentConfig& config,
                                              const HitTable& table) {
  std::vector<TailEstimate> out;
  out.reserve(table.hits.size());
  for (std::size_t c = 0; c < table.checkpoint_times.size(); ++c) {
    const std::int64_t horizon = table.checkpoint_times[c];
    for (std::size_t i = 0; i < table.per_checkpoint; ++i) {
      const std::size_t slot = c * table.per_checkpoint + i;
      const double x = table.thresholds[slot];
      const double log_denominator = config.scale == ExponentScale::LogThreshold
                                         ? std::log(x)
                                         : std::log(static_cast<double>(horizon));
      out.push_back(make_tail_estimate(horizon, x, table.hits[slot], table.reps,
                                       log_denominator));
    }
  }
  return out;
}

std::vector<TailEstimate> estimate_tail(const ExperimentConfig& config) {
  return estimates_from_hits(config, count_hits(config));
}

std::vector<CurvePoint> exponent_curve_fixed_T(const ExperimentConfig& config) {
  ExperimentConfig fixed = config;
  fixed.checkpoints = {config.horizon};
  fixed.scale = ExponentScale::LogThreshold;
  if (fixed.thresholds.values.empty()) {
    fixed.thresholds.fractional = true;
    for (int i = 1; i <= 19; ++i) fixed.thresholds.values.push_back(0.05 * i);
  }
  std::vector<CurvePoint> curve;
  for (auto& e : estimate_tail(fixed)) {
    curve.push_back({e.horizon, e.threshold, e});
  }
  return curve;
}

std::vector<CurvePoint> exponent_curve_fixed_frac(const ExperimentConfig& config,
                                                  double fraction) {
  ExperimentConfig fixed = config;
  fixed.thresholds = {{fraction}, true};
  fixed.scale = ExponentScale::LogHorizon;
  std::vector<CurvePoint> curve;
  for (auto& e : estimate_tail(fixed)) {
    curve.push_back({e.horizon, e.threshold, e});
  }
  return curve;
}

}  // namespace tailreg::harness

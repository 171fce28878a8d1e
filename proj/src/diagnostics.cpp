#include <algorithm>
#include <cmath>

#include "tailreg/errors.hpp"
#include "tailreg/harness.hpp"

namespace tailreg::harness {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

ConditionalReport conditional_diagnostics(const ExperimentConfig& config, double x) {
  if (config.arms.size() != 2) {
    throw UsageError("conditional diagnostics need exactly two arms");
  }
  if (!(x >= 1.0 && x <= static_cast<double>(config.horizon))) {
    throw UsageError("conditional diagnostics: x must lie in [1, T]");
  }
  const std::size_t optimal = config.optimal_arm();
  const std::size_t suboptimal = 1 - optimal;
  const double mu1 = envproc::long_run_mean(config.arms[optimal]);
  const double mu2 = envproc::long_run_mean(config.arms[suboptimal]);
  const double gap = mu1 - mu2;

  const auto runs = run_all(config);
  ConditionalReport report;
  report.reps = config.replications;
  CompensatedSum cond1, cond2, all1, all2;
  std::int64_t under = 0;
  std::int64_t close = 0;
  for (const auto& run : runs) {
    const double m1 = run.final_means[optimal];
    const double m2 = run.final_means[suboptimal];
    all1.add(m1);
    all2.add(m2);
    if (!event_occurs(config.event, run.regret.back(), x)) continue;
    ++report.conditioned;
    cond1.add(m1);
    cond2.add(m2);
    if (m1 < mu1 - gap / 2.0) ++under;
    if (std::abs(m2 - mu2) < 0.05) ++close;
  }
  const auto reps = static_cast<double>(report.reps);
  report.unconditional_mean_optimal = all1.value() / reps;
  report.unconditional_mean_suboptimal = all2.value() / reps;
  report.p_hat = static_cast<double>(report.conditioned) / reps;
  report.censored = report.conditioned == 0;
  if (!report.censored) {
    const auto n = static_cast<double>(report.conditioned);
    report.mean_optimal = cond1.value() / n;
    report.mean_suboptimal = cond2.value() / n;
    report.fraction_optimal_under = static_cast<double>(under) / n;
    report.fraction_suboptimal_close = static_cast<double>(close) / n;
  }
  return report;
}

std::vector<MomentEstimate> moment_estimate(const ExperimentConfig& config, double p) {
  if (!(p >= 1.0)) throw UsageError("moment order must be >= 1");
  const auto runs = run_all(config);
  const auto checkpoints = config.effective_checkpoints();
  std::vector<MomentEstimate> out;
  const auto reps = static_cast<double>(runs.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CompensatedSum sum;
    for (const auto& run : runs) {  // replication order
      sum.add(std::pow(static_cast<double>(run.regret[c]), p));
    }
    const double mean = sum.value() / reps;
    CompensatedSum squares;
    for (const auto& run : runs) {
      const double d = std::pow(static_cast<double>(run.regret[c]), p) - mean;
      squares.add(d * d);
    }
    const double var = reps > 1 ? squares.value() / (reps - 1.0) : 0.0;
    const double half = 1.959963984540054 * std::sqrt(var / reps);
    out.push_back({checkpoints[c], mean, mean - half, mean + half});
  }
  return out;
}

std::vector<double> log_normalized_median(const ExperimentConfig& config) {
  const auto runs = run_all(config);
  const auto checkpoints = config.effective_checkpoints();
  std::vector<double> out;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<double> values;
    values.reserve(runs.size());
    const double log_t = std::log(static_cast<double>(checkpoints[c]));
    for (const auto& run : runs) {
      values.push_back(static_cast<double>(run.regret[c]) / log_t);
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    out.push_back(n % 2 == 1 ? values[n / 2]
                             : 0.5 * (values[n / 2 - 1] + values[n / 2]));
  }
  return out;
}

}  // namespace tailreg::harness

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tailreg/envproc.hpp"
#include "tailreg/policy.hpp"

namespace tailreg::harness {

/// Which tail event is counted: N(T) ≥ x or N(T) > x.
enum class EventKind { AtLeast, Greater };

/// Denominator of the plotted exponent: ln x (fixed-T curves) or ln T
/// (fixed-fraction curves).
enum class ExponentScale { LogThreshold, LogHorizon };

struct KlUcbPolicy {
  policy::DivergenceSpec divergence =
      policy::DivergenceSpec::family_kl(expfam::Family::gaussian(1.0));
};

struct ThompsonPolicy {
  double variance = 1.0;
};

using PolicySpec = std::variant<KlUcbPolicy, ThompsonPolicy>;

/// Thresholds either as absolute counts or as fractions of each checkpoint T.
struct ThresholdGrid {
  std::vector<double> values;
  bool fractional = true;
};

struct ExperimentConfig {
  std::string experiment = "custom";
  std::string curve_param;
  std::vector<envproc::RewardProcess> arms;
  PolicySpec policy;
  std::int64_t horizon = 1000;
  std::int64_t replications = 1000;
  /// Sorted ascending, all ≤ horizon. Empty means {horizon}.
  std::vector<std::int64_t> checkpoints;
  ThresholdGrid thresholds{{0.5}, true};
  EventKind event = EventKind::AtLeast;
  ExponentScale scale = ExponentScale::LogThreshold;
  std::uint64_t seed = 1;
  int workers = 1;
  std::optional<double> analytic_exponent;

  /// Throws UsageError on any violated invariant.
  void validate() const;

  std::vector<std::int64_t> effective_checkpoints() const;
  double threshold(std::size_t index, std::int64_t horizon_at) const;
  /// Arm with the largest long-run mean (smallest id on ties).
  std::size_t optimal_arm() const;
};

/// One replication. Regret is the number of pulls of non-optimal arms
/// (N₂(T) for two arms).
struct RunResult {
  std::int64_t replication = 0;
  std::size_t arms = 0;
  std::vector<std::int64_t> checkpoint_times;
  /// counts[c * arms + k] = N_k at checkpoint c.
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> regret;
  std::vector<double> final_means;

  std::int64_t count(std::size_t checkpoint, std::size_t arm) const {
    return counts[checkpoint * arms + arm];
  }

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Deterministic in (config, seed, replication): arm k draws from
/// Stream::derive(seed, replication, k), the policy from lane K.
RunResult run_replication(const ExperimentConfig& config, std::int64_t replication);

struct TailEstimate {
  std::int64_t horizon = 0;
  double threshold = 0.0;
  std::int64_t hits = 0;
  std::int64_t reps = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> exponent;
  std::optional<double> exponent_ci_lo;
  std::optional<double> exponent_ci_hi;
  bool censored = false;
  /// Rule-of-three bound ln(3/R)/ln(denominator), set when censored.
  std::optional<double> censored_bound;
};

struct WilsonInterval {
  double lo;
  double hi;
};

/// 95% Wilson score interval for hits out of n.
WilsonInterval wilson_interval(std::int64_t hits, std::int64_t n);

/// Builds the estimate; the exponent is ln P̂ / log_denominator.
TailEstimate make_tail_estimate(std::int64_t horizon, double threshold,
                                std::int64_t hits, std::int64_t reps,
                                double log_denominator);

bool event_occurs(EventKind event, std::int64_t regret, double threshold);

/// Hit counts hits[c * X + i] for checkpoint c and threshold i.
struct HitTable {
  std::vector<std::int64_t> checkpoint_times;
  std::vector<double> thresholds;  // thresholds[c * X + i]
  std::size_t per_checkpoint = 0;
  std::vector<std::int64_t> hits;
  std::int64_t reps = 0;

  friend bool operator==(const HitTable&, const HitTable&) = default;
};

/// OpenMP kernel over replications with `config.workers` threads.
HitTable count_hits(const ExperimentConfig& config);
/// Serial reference kernel. Must agree exactly with `count_hits`.
HitTable count_hits_serial(const ExperimentConfig& config);

/// One estimate per (checkpoint, threshold), exponent per `config.scale`.
std::vector<TailEstimate> estimate_tail(const ExperimentConfig& config);
std::vector<TailEstimate> estimates_from_hits(const ExperimentConfig& config,
                                              const HitTable& table);

struct CurvePoint {
  std::int64_t horizon;
  double threshold;
  TailEstimate estimate;  // exponent uses the curve's own denominator
};

/// (x, ln P̂/ln x) at the final horizon; the threshold grid defaults to
/// fractions 0.05, 0.10, ..., 0.95 of T when the config has none.
std::vector<CurvePoint> exponent_curve_fixed_T(const ExperimentConfig& config);

/// (T, ln P̂(N ≥ frac·T)/ln T) at every checkpoint from one pass.
std::vector<CurvePoint> exponent_curve_fixed_frac(const ExperimentConfig& config,
                                                  double fraction);

/// All replications, in replication order.
std::vector<RunResult> run_all(const ExperimentConfig& config);

struct ConditionalReport {
  std::int64_t reps = 0;
  std::int64_t conditioned = 0;
  double p_hat = 0.0;
  bool censored = true;
  double mean_optimal = 0.0;             // conditional mean of μ̂₁(T)
  double mean_suboptimal = 0.0;          // conditional mean of μ̂₂(T)
  double unconditional_mean_optimal = 0.0;
  double unconditional_mean_suboptimal = 0.0;
  /// Fraction of conditioned reps with μ̂₁ < μ₁ − gap/2.
  double fraction_optimal_under = 0.0;
  /// Fraction of conditioned reps with |μ̂₂ − μ₂| < 0.05.
  double fraction_suboptimal_close = 0.0;
};

/// Sample means at the final horizon conditioned on the tail event at x.
/// Two-armed configs only.
ConditionalReport conditional_diagnostics(const ExperimentConfig& config, double x);

struct MomentEstimate {
  std::int64_t horizon;
  double mean;
  double ci_lo;
  double ci_hi;
};

/// E[N(T)^p] at every checkpoint with a normal 95% interval.
std::vector<MomentEstimate> moment_estimate(const ExperimentConfig& config, double p);

/// Median over replications of N(T)/ln T at every checkpoint.
std::vector<double> log_normalized_median(const ExperimentConfig& config);

/// Exact law of N₂(T) for KL-UCB on two Bernoulli arms, by enumerating every
/// reward sequence (T ≤ 20). Entry n is P(N₂(T) = n).
std::vector<double> exact_regret_distribution_bernoulli(
    double p1, double p2, const policy::DivergenceSpec& divergence,
    std::int64_t horizon);

/// P(N₂(T) ≥ x) (or > x) from the exact law.
double exact_tail_bernoulli(double p1, double p2,
                            const policy::DivergenceSpec& divergence,
                            std::int64_t horizon, double x,
                            EventKind event = EventKind::AtLeast);

}  // namespace tailreg::harness

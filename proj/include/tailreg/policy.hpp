#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tailreg/expfam.hpp"
#include "tailreg/rng.hpp"

namespace tailreg::policy {

/// A user-supplied mean-parametrized divergence on an open interval.
struct CustomDivergence {
  std::function<double(double, double)> fn;
  expfam::Interval domain;
  std::string name = "custom";
};

/// Divergence D used by KL-UCB together with its robustness scale: the
/// policy runs with D/(1+b).
class DivergenceSpec {
 public:
  static DivergenceSpec family_kl(const expfam::Family& family, double b = 0.0);
  /// Checks zero-iff-equal and convexity in each argument on a grid.
  static DivergenceSpec custom(CustomDivergence divergence, double b = 0.0);

  double b() const noexcept { return b_; }
  double scale() const noexcept { return 1.0 + b_; }
  expfam::Interval domain() const noexcept;
  const std::optional<expfam::Family>& family() const noexcept { return family_; }
  bool is_gaussian() const noexcept {
    return family_ && family_->kind() == expfam::Kind::GaussianKnownVar;
  }
  std::string name() const;

  /// Unscaled divergence D(u, v).
  double base(double u, double v) const;
  /// Scaled divergence D(u, v)/(1+b).
  double operator()(double u, double v) const { return base(u, v) / scale(); }

  /// Same base divergence with b replaced.
  DivergenceSpec with_b(double b) const;

 private:
  DivergenceSpec() = default;

  std::optional<expfam::Family> family_;
  std::optional<CustomDivergence> custom_;
  double b_ = 0.0;
};

/// Returns `div` with robustness scale composed: (1+b_new) = (1+b_old)(1+b).
DivergenceSpec robust_scale(const DivergenceSpec& div, double b);

/// Variance proxy σ²(1+b) of the sub-Gaussian class reached by scaling.
double subgaussian_enlargement(double variance, double b);

struct IndexOptions {
  /// Use bisection even where a closed form exists.
  bool force_bisection = false;
  /// Required absolute accuracy; bisection itself runs to full precision.
  double tolerance = 1e-9;
  int max_iterations = 64;
};

/// sup{u ≥ μ̂ : D(μ̂, u) ≤ budget} on the unscaled base divergence.
double index_for_budget(double mean, double budget, const DivergenceSpec& div,
                        const IndexOptions& options = {});

/// KL-UCB index U(n, t) with exploration budget (1+b)·ln(t)/n.
/// `t` may be any real ≥ 1.
double ucb_index(double mean, std::int64_t n, double t,
                 const DivergenceSpec& div, const IndexOptions& options = {});

/// Same index computed by solving (D/(1+b))(μ̂, u) ≤ ln(t)/n directly on the
/// scaled divergence.
double ucb_index_scaled_divergence(double mean, std::int64_t n, double t,
                                   const DivergenceSpec& div,
                                   const IndexOptions& options = {});

/// Per-arm sufficient statistics. Sums are Neumaier-compensated.
class PolicyState {
 public:
  explicit PolicyState(std::size_t arms);

  void reset();
  void update(std::size_t arm, double reward);

  std::size_t arms() const noexcept { return counts_.size(); }
  std::int64_t time() const noexcept { return time_; }
  std::int64_t count(std::size_t arm) const { return counts_[arm]; }
  double sum(std::size_t arm) const { return sums_[arm] + compensation_[arm]; }
  double mean(std::size_t arm) const { return means_[arm]; }

  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

  /// Overwrites an arm's statistics (test fixtures, replay).
  void set_arm(std::size_t arm, std::int64_t count, double mean);

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  std::vector<double> compensation_;
  std::vector<double> means_;
  std::int64_t time_ = 0;
};

/// Precomputed KL-UCB evaluator for the simulation loop.
class KlUcb {
 public:
  explicit KlUcb(DivergenceSpec div);

  const DivergenceSpec& divergence() const noexcept { return div_; }

  /// Index given ln(t) already evaluated.
  double index(double mean, std::int64_t n, double log_t) const {
    if (gaussian_) {
      return mean + std::sqrt(gaussian_factor_ * log_t / static_cast<double>(n));
    }
    return index_for_budget(mean, div_.scale() * log_t / static_cast<double>(n),
                            div_);
  }

 private:
  DivergenceSpec div_;
  bool gaussian_;
  double gaussian_factor_;  // 2σ²(1+b)
};

/// Arm for play number `t` (1-based). Plays 1..K pull arms 0..K−1 in order;
/// later plays maximize the KL-UCB index with ln(t−1), i.e. the log of the
/// number of completed plays. Ties go to the smallest arm id.
std::size_t select_arm(const PolicyState& state, const KlUcb& policy,
                       std::int64_t t);
std::size_t select_arm(const PolicyState& state, const DivergenceSpec& div,
                       std::int64_t t);

/// Gaussian Thompson sampling with known variance σ²: draws
/// N(μ̂_k, σ²/N_k) per arm after the same initialization phase.
std::size_t ts_gaussian_select(const PolicyState& state, double variance,
                               std::int64_t t, rng::Stream& stream);

}  // namespace tailreg::policy

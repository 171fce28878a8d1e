#pragma once

#include <string>
#include <string_view>

namespace tailreg::expfam {

enum class Kind { GaussianKnownVar, Bernoulli, Poisson, Exponential };

/// Open interval; either end may be infinite.
struct Interval {
  double lo;
  double hi;

  bool contains(double x) const noexcept { return x > lo && x < hi; }
};

/// Means closer than this to a finite mean-domain endpoint are rejected.
inline constexpr double kEndpointGuard = 1e-12;

/// Natural one-parameter exponential family p(x, θ) = h(x) exp(xθ − A(θ)).
/// The carrier h and dominating measure are implicit in the kind.
class Family {
 public:
  static Family gaussian(double variance);
  static Family bernoulli() noexcept { return Family(Kind::Bernoulli, 0.0); }
  static Family poisson() noexcept { return Family(Kind::Poisson, 0.0); }
  static Family exponential() noexcept {
    return Family(Kind::Exponential, 0.0);
  }

  Kind kind() const noexcept { return kind_; }
  /// σ² of the Gaussian kind; 0 for the others.
  double variance() const noexcept { return variance_; }

  Interval natural_domain() const noexcept;
  Interval mean_domain() const noexcept;
  std::string_view name() const noexcept;

  friend bool operator==(const Family&, const Family&) = default;

 private:
  Family(Kind kind, double variance) : kind_(kind), variance_(variance) {}

  Kind kind_;
  double variance_;
};

/// KL divergence in nats.
struct KlValue {
  double nats = 0.0;

  friend auto operator<=>(const KlValue&, const KlValue&) = default;
};

double log_partition(const Family& family, double theta);
double mean_from_natural(const Family& family, double theta);
double natural_from_mean(const Family& family, double mean);

/// KL(P_{μ1} ‖ P_{μ2}) via the Bregman identity on natural parameters.
KlValue kl_mean(const Family& family, double mean1, double mean2);

/// A*(μ) = θ(μ)·μ − A(θ(μ)), the convex conjugate of the log-partition.
double conjugate_at_mean(const Family& family, double mean);

/// Natural parameter of the exponentially tilted member with mean `z`.
double tilt_to_mean(const Family& family, double z);

struct A2Verdict {
  bool holds;
  std::string reason;
};

/// Table-driven decision of the (A2) condition:
/// lim_{θ→−∞} θA′(θ) − A(θ) = ∞.
A2Verdict check_a2(const Family& family);

/// Throws DomainError unless `mean` lies strictly inside the mean-domain,
/// at least kEndpointGuard away from any finite endpoint.
void require_mean(const Family& family, double mean);

}  // namespace tailreg::expfam

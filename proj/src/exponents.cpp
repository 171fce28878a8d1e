#include "tailreg/exponents.hpp"

#include <cmath>
#include <sstream>

#include "tailreg/errors.hpp"
#include "tailreg/infimum.hpp"
#include "tailreg/markov.hpp"

namespace tailreg::exponents {
namespace {

void require_b(double b) {
  if (!(b >= 0.0) || !std::isfinite(b)) {
    throw UsageError("robustness scale b must be non-negative");
  }
}

void require_variance(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be positive, got " << v;
    throw UsageError(msg.str());
  }
}

void require_ordered(double mean1, double mean2) {
  if (!(mean1 > mean2)) {
    std::ostringstream msg;
    msg << "optimal mean " << mean1 << " must exceed sub-optimal mean " << mean2;
    throw UsageError(msg.str());
  }
}

}  // namespace

std::string_view to_string(BoundKind kind) noexcept {
  return kind == BoundKind::Exact ? "exact" : "lower-bound";
}

double kl_ratio_boundary_limit(const expfam::Family& family, double mean1,
                               double mean2) {
  expfam::require_mean(family, mean1);
  expfam::require_mean(family, mean2);
  require_ordered(mean1, mean2);
  switch (family.kind()) {
    case expfam::Kind::GaussianKnownVar:
      // (z − μ1)² / (z − μ2)² → 1.
      return 1.0;
    case expfam::Kind::Exponential:
      // z/μ − 1 − ln(z/μ) is dominated by −ln z as z ↓ 0.
      return 1.0;
    case expfam::Kind::Bernoulli:
      // D(z, μ) → −ln(1 − μ) as z ↓ 0.
      return std::log1p(-mean1) / std::log1p(-mean2);
    case expfam::Kind::Poisson:
      // D(z, μ) = z ln(z/μ) − z + μ → μ as z ↓ 0.
      return mean1 / mean2;
  }
  return 1.0;
}

double kl_ratio_infimum_numeric(const expfam::Family& family, double mean1,
                                double mean2) {
  expfam::require_mean(family, mean1);
  expfam::require_mean(family, mean2);
  require_ordered(mean1, mean2);
  auto ratio = [&](double z) {
    return expfam::kl_mean(family, z, mean1).nats /
           expfam::kl_mean(family, z, mean2).nats;
  };
  return numeric::infimum_below(ratio, mean2, family.mean_domain().lo).value;
}

ExponentReport wellspec_expfam_exponent(const expfam::Family& family, double mean1,
                                        double mean2, double b) {
  require_b(b);
  const double limit = kl_ratio_boundary_limit(family, mean1, mean2);
  std::string formula = "kl-ucb-expfam-";
  formula += family.name();
  return {-(1.0 + b) * limit, BoundKind::Exact, formula};
}

ExponentReport gaussian_misspec_exponent(double assumed_variance,
                                         double true_variance, double b) {
  require_variance(assumed_variance, "assumed variance");
  require_variance(true_variance, "true variance");
  require_b(b);
  return {-(1.0 + b) * assumed_variance / true_variance, BoundKind::Exact,
          "gaussian-misspec"};
}

ExponentReport ar1_exponent_bound(double assumed_variance,
                                  double innovation_variance, double beta,
                                  double b) {
  require_variance(assumed_variance, "assumed variance");
  require_variance(innovation_variance, "innovation variance");
  require_b(b);
  if (!(beta > 0.0 && beta < 1.0)) {
    throw UsageError("ar1 coefficient must lie in (0, 1)");
  }
  const double one_minus = 1.0 - beta;
  return {-(1.0 + b) * assumed_variance / innovation_variance * one_minus * one_minus,
          BoundKind::LowerBound, "ar1"};
}

ExponentReport ar1_marginal_matched(double beta, double b) {
  require_b(b);
  if (!(beta > 0.0 && beta < 1.0)) {
    throw UsageError("ar1 coefficient must lie in (0, 1)");
  }
  return {-(1.0 + b) * (1.0 - beta) / (1.0 + beta), BoundKind::LowerBound,
          "ar1-marginal-matched"};
}

ExponentReport gartner_ellis_exponent(const RateFunction& rate,
                                      const MeanDivergence& policy_divergence,
                                      double mean2, double lower) {
  auto ratio = [&](double z) { return rate(z) / policy_divergence(z, mean2); };
  const auto inf = numeric::infimum_below(ratio, mean2, lower);
  return {-inf.value, BoundKind::LowerBound, "gartner-ellis"};
}

ExponentReport markov_exponent(const Eigen::MatrixXd& optimal,
                               const Eigen::MatrixXd& suboptimal,
                               std::span<const double> states,
                               const MeanDivergence& policy_divergence, double b) {
  require_b(b);
  const double scale = 1.0 + b;
  auto scaled = [&](double u, double v) { return policy_divergence(u, v) / scale; };
  return {markov::markov_tail_exponent(optimal, suboptimal, states, scaled),
          BoundKind::Exact, "markov"};
}

}  // namespace tailreg::exponents

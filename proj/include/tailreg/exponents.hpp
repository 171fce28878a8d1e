#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "tailreg/expfam.hpp"

namespace tailreg::exponents {

enum class BoundKind { Exact, LowerBound };

/// Limit of log P(N₂(T) ≥ x) / log x predicted by a closed-form result.
struct ExponentReport {
  double exponent;
  BoundKind kind;
  std::string formula;
};

std::string_view to_string(BoundKind kind) noexcept;

/// lim_{z ↓ inf M} D(z, μ1) / D(z, μ2) in closed form per family kind.
double kl_ratio_boundary_limit(const expfam::Family& family, double mean1,
                               double mean2);

/// inf_{z < μ2} D(z, μ1) / D(z, μ2) by grid search plus golden-section; an
/// independent numeric route to `kl_ratio_boundary_limit`.
double kl_ratio_infimum_numeric(const expfam::Family& family, double mean1,
                                double mean2);

/// KL-UCB tuned to the family, arms from the family: −(1+b)·inf ratio.
ExponentReport wellspec_expfam_exponent(const expfam::Family& family, double mean1,
                                        double mean2, double b = 0.0);

/// Gaussian KL-UCB assuming σ² on Gaussian arms of variance σ₀².
ExponentReport gaussian_misspec_exponent(double assumed_variance,
                                         double true_variance, double b = 0.0);

/// Gaussian KL-UCB assuming σ² on AR(1) arms (innovation variance σ₁²,
/// coefficient β₁ of the optimal arm). One-sided.
ExponentReport ar1_exponent_bound(double assumed_variance,
                                  double innovation_variance, double beta,
                                  double b = 0.0);

/// AR(1) arms with common β₀ and the policy variance set to the stationary
/// variance: −(1+b)(1−β₀)/(1+β₀). One-sided.
ExponentReport ar1_marginal_matched(double beta, double b = 0.0);

using RateFunction = std::function<double(double)>;
using MeanDivergence = std::function<double(double, double)>;

/// −inf_{z < μ2} Λ₁*(z) / D^π(z, μ2). `lower` bounds the search from below
/// (−∞ for unbounded long-run means). One-sided.
ExponentReport gartner_ellis_exponent(const RateFunction& rate,
                                      const MeanDivergence& policy_divergence,
                                      double mean2,
                                      double lower = -std::numeric_limits<double>::infinity());

/// Finite-state Markov arms; delegates to markov::markov_tail_exponent.
ExponentReport markov_exponent(const Eigen::MatrixXd& optimal,
                               const Eigen::MatrixXd& suboptimal,
                               std::span<const double> states,
                               const MeanDivergence& policy_divergence,
                               double b = 0.0);

}  // namespace tailreg::exponents

#include "tailreg/expfam.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tailreg/errors.hpp"

namespace tailreg::expfam {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^θ) without overflow.
double softplus(double theta) {
  return theta > 0.0 ? theta + std::log1p(std::exp(-theta))
                     : std::log1p(std::exp(theta));
}

double logistic(double theta) {
  if (theta >= 0.0) return 1.0 / (1.0 + std::exp(-theta));
  const double e = std::exp(theta);
  return e / (1.0 + e);
}

[[noreturn]] void domain_fail(const Family& family, const char* what,
                              double value) {
  std::ostringstream msg;
  msg.precision(17);
  msg << family.name() << ": " << what << " " << value
      << " is outside the domain";
  throw DomainError(msg.str());
}

void require_natural(const Family& family, double theta) {
  if (!family.natural_domain().contains(theta)) {
    domain_fail(family, "natural parameter", theta);
  }
}

}  // namespace

Family Family::gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    std::ostringstream msg;
    msg << "gaussian: variance must be positive and finite, got " << variance;
    throw DomainError(msg.str());
  }
  return Family(Kind::GaussianKnownVar, variance);
}

Interval Family::natural_domain() const noexcept {
  if (kind_ == Kind::Exponential) return {-kInf, 0.0};
  return {-kInf, kInf};
}

Interval Family::mean_domain() const noexcept {
  switch (kind_) {
    case Kind::GaussianKnownVar:
      return {-kInf, kInf};
    case Kind::Bernoulli:
      return {0.0, 1.0};
    case Kind::Poisson:
    case Kind::Exponential:
      return {0.0, kInf};
  }
  return {-kInf, kInf};
}

std::string_view Family::name() const noexcept {
  switch (kind_) {
    case Kind::GaussianKnownVar:
      return "gaussian";
    case Kind::Bernoulli:
      return "bernoulli";
    case Kind::Poisson:
      return "poisson";
    case Kind::Exponential:
      return "exponential";
  }
  return "unknown";
}

void require_mean(const Family& family, double mean) {
  const Interval m = family.mean_domain();
  if (!(mean >= m.lo + kEndpointGuard) || !(mean <= m.hi - kEndpointGuard)) {
    domain_fail(family, "mean", mean);
  }
}

double log_partition(const Family& family, double theta) {
  require_natural(family, theta);
  switch (family.kind()) {
    case Kind::GaussianKnownVar:
      return 0.5 * family.variance() * theta * theta;
    case Kind::Bernoulli:
      return softplus(theta);
    case Kind::Poisson:
      return std::exp(theta);
    case Kind::Exponential:
      return -std::log(-theta);
  }
  return 0.0;
}

double mean_from_natural(const Family& family, double theta) {
  require_natural(family, theta);
  switch (family.kind()) {
    case Kind::GaussianKnownVar:
      return family.variance() * theta;
    case Kind::Bernoulli:
      return logistic(theta);
    case Kind::Poisson:
      return std::exp(theta);
    case Kind::Exponential:
      return -1.0 / theta;
  }
  return 0.0;
}

double natural_from_mean(const Family& family, double mean) {
  require_mean(family, mean);
  switch (family.kind()) {
    case Kind::GaussianKnownVar:
      return mean / family.variance();
    case Kind::Bernoulli:
      return std::log(mean) - std::log1p(-mean);
    case Kind::Poisson:
      return std::log(mean);
    case Kind::Exponential:
      return -1.0 / mean;
  }
  return 0.0;
}

KlValue kl_mean(const Family& family, double mean1, double mean2) {
  const double theta1 = natural_from_mean(family, mean1);
  const double theta2 = natural_from_mean(family, mean2);
  if (mean1 == mean2) return {0.0};
  // D(θ1, θ2) = A(θ2) − A(θ1) − A′(θ1)(θ2 − θ1), with A′(θ1) = μ1.
  const double d = log_partition(family, theta2) -
                   log_partition(family, theta1) - mean1 * (theta2 - theta1);
  return {d > 0.0 ? d : 0.0};
}

double conjugate_at_mean(const Family& family, double mean) {
  const double theta = natural_from_mean(family, mean);
  return theta * mean - log_partition(family, theta);
}

double tilt_to_mean(const Family& family, double z) {
  return natural_from_mean(family, z);
}

A2Verdict check_a2(const Family& family) {
  switch (family.kind()) {
    case Kind::GaussianKnownVar:
      return {true, "steep: A'(theta) = sigma^2 theta -> -inf as theta -> -inf"};
    case Kind::Bernoulli:
      return {false,
              "support bounded to the left with positive mass at the left "
              "endpoint 0"};
    case Kind::Poisson:
      return {false,
              "support bounded to the left with positive mass at the left "
              "endpoint 0"};
    case Kind::Exponential:
      return {true,
              "continuous distributions with support bounded to the left "
              "(not steep, mean-domain infimum 0)"};
  }
  return {false, "unknown family"};
}

}  // namespace tailreg::expfam

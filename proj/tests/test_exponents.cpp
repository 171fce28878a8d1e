#include <cmath>
#include <vector>

#include "doctest.h"
#include "tailreg/errors.hpp"
#include "tailreg/exponents.hpp"

using namespace tailreg;
using namespace tailreg::exponents;

namespace {

const auto kBern = expfam::Family::bernoulli();

Eigen::MatrixXd iid_rows(double p) {
  Eigen::MatrixXd q(2, 2);
  q << 1 - p, p, 1 - p, p;
  return q;
}

}  // namespace

TEST_CASE("Bernoulli exponents from the figure captions") {
  CHECK(wellspec_expfam_exponent(kBern, 0.475, 0.4).exponent == doctest::Approx(-1.26).epsilon(0.005 / 1.26));
  CHECK(wellspec_expfam_exponent(kBern, 0.5, 0.4).exponent == doctest::Approx(-1.36).epsilon(0.005 / 1.36));
  CHECK(wellspec_expfam_exponent(kBern, 0.525, 0.4).exponent == doctest::Approx(-1.46).epsilon(0.005 / 1.46));
  CHECK(wellspec_expfam_exponent(kBern, 0.5, 0.4).exponent ==
        doctest::Approx(std::log(0.5) / std::log(0.6) * -1.0).epsilon(1e-14));
}

TEST_CASE("well-specified Gaussian exponent is exactly -(1+b)") {
  for (double var : {0.5, 1.0, 3.0}) {
    for (double m1 : {0.1, 1.0, 5.0}) {
      for (double b : {0.0, 0.25, 0.75}) {
        const auto r = wellspec_expfam_exponent(expfam::Family::gaussian(var), m1, 0.0, b);
        CHECK(r.exponent == -(1.0 + b));
        CHECK(r.kind == BoundKind::Exact);
      }
    }
  }
  CHECK(wellspec_expfam_exponent(expfam::Family::gaussian(1.0), 0.1, 0.0, 0.75).exponent == -1.75);
}

TEST_CASE("ordering and scale preconditions") {
  CHECK_THROWS_AS(wellspec_expfam_exponent(kBern, 0.4, 0.475), UsageError);
  CHECK_THROWS_AS(wellspec_expfam_exponent(kBern, 0.4, 0.4), UsageError);
  CHECK_THROWS_AS(wellspec_expfam_exponent(kBern, 0.5, 0.4, -0.1), UsageError);
  CHECK_THROWS_AS(gaussian_misspec_exponent(0.0, 1.0), UsageError);
  CHECK_THROWS_AS(ar1_exponent_bound(1.0, 1.0, 1.0), UsageError);
  CHECK_THROWS_AS(ar1_marginal_matched(0.0), UsageError);
}

TEST_CASE("Bernoulli exponent is strictly below -1") {
  for (double m2 = 0.05; m2 < 0.95; m2 += 0.1) {
    for (double m1 = m2 + 0.03; m1 < 0.99; m1 += 0.1) {
      CHECK(wellspec_expfam_exponent(kBern, m1, m2).exponent < -1.0);
    }
  }
}

TEST_CASE("closed-form boundary limit matches the numeric infimum") {
  for (double m2 = 0.1; m2 < 0.9; m2 += 0.15) {
    for (double m1 = m2 + 0.05; m1 < 0.97; m1 += 0.15) {
      CHECK(kl_ratio_infimum_numeric(kBern, m1, m2) ==
            doctest::Approx(kl_ratio_boundary_limit(kBern, m1, m2)).epsilon(1e-6));
    }
  }
  const auto poisson = expfam::Family::poisson();
  for (double m2 : {0.3, 1.0, 4.0}) {
    for (double m1 : {m2 * 1.2, m2 * 2.0}) {
      CHECK(kl_ratio_infimum_numeric(poisson, m1, m2) ==
            doctest::Approx(kl_ratio_boundary_limit(poisson, m1, m2)).epsilon(1e-6));
    }
  }
  CHECK(kl_ratio_infimum_numeric(expfam::Family::gaussian(2.0), 0.5, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Gaussian mis-specification") {
  CHECK(gaussian_misspec_exponent(1.0, 4.0).exponent == -0.25);
  CHECK(gaussian_misspec_exponent(2.0, 2.0).exponent == -1.0);
  CHECK(gaussian_misspec_exponent(1.0, 2.0, 1.0).exponent == -1.0);
  CHECK(gaussian_misspec_exponent(1.0, 4.0).kind == BoundKind::Exact);
  double previous = -1.0;
  for (double var0 = 1.5; var0 < 1e6; var0 *= 2.0) {
    const double e = gaussian_misspec_exponent(1.0, var0).exponent;
    CHECK(e > -1.0);
    CHECK(e > previous);
    previous = e;
  }
  CHECK(previous > -1e-5);
  for (double var0 = 0.1; var0 <= 1.0; var0 += 0.1) {
    for (double b : {0.0, 0.5}) CHECK(gaussian_misspec_exponent(1.0, var0, b).exponent <= -(1.0 + b));
  }
}

TEST_CASE("AR(1) bounds") {
  const auto r = ar1_marginal_matched(0.5);
  CHECK(r.exponent == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(r.kind == BoundKind::LowerBound);
  const double beta = 0.45;
  const double b = 1.1 * (1 + beta) / (1 - beta) - 1.0;
  CHECK(ar1_marginal_matched(beta, b).exponent == doctest::Approx(-1.1).epsilon(1e-14));
  // β → 0 reduces to the iid mis-specified case.
  CHECK(ar1_exponent_bound(1.0, 4.0, 1e-12).exponent ==
        doctest::Approx(gaussian_misspec_exponent(1.0, 4.0).exponent).epsilon(1e-10));
  CHECK(ar1_exponent_bound(1.0, 4.0, 0.3).kind == BoundKind::LowerBound);
  // Marginal matching: σ₁² = σ²(1−β²).
  CHECK(ar1_exponent_bound(1.0, 1.0 - 0.36, 0.6).exponent ==
        doctest::Approx(ar1_marginal_matched(0.6).exponent).epsilon(1e-14));
}

TEST_CASE("Gartner-Ellis calculator") {
  const double m1 = 0.1;
  const double m2 = 0.0;
  for (double var0 : {0.5, 1.0, 2.5, 4.0}) {
    for (double var : {1.0, 2.0}) {
      auto rate = [&](double z) { return (z - m1) * (z - m1) / (2 * var0); };
      auto dpi = [&](double u, double v) { return (u - v) * (u - v) / (2 * var); };
      const auto r = gartner_ellis_exponent(rate, dpi, m2);
      CHECK(r.exponent == doctest::Approx(-var / var0).epsilon(1e-6));
      CHECK(r.kind == BoundKind::LowerBound);
      auto scaled = [&](double u, double v) { return dpi(u, v) / 1.5; };
      CHECK(gartner_ellis_exponent(rate, scaled, m2).exponent == doctest::Approx(-1.5 * var / var0).epsilon(1e-6));
    }
  }
  // AR(1) rate function reproduces the closed-form bound.
  for (double beta : {0.15, 0.45, 0.6}) {
    const double innov = 0.7;
    const double mean = 0.1;
    auto rate = [&](double z) { return (1 - beta) * (1 - beta) * (z - mean) * (z - mean) / (2 * innov); };
    auto dpi = [](double u, double v) { return (u - v) * (u - v) / 2.0; };
    CHECK(gartner_ellis_exponent(rate, dpi, 0.0).exponent ==
          doctest::Approx(ar1_exponent_bound(1.0, innov, beta).exponent).epsilon(1e-6));
  }
  auto broken = [](double) { return std::nan(""); };
  auto dpi = [](double u, double v) { return (u - v) * (u - v); };
  CHECK_THROWS_AS(gartner_ellis_exponent(broken, dpi, 0.0), NumericError);
}

TEST_CASE("Markov exponent delegates with the (1+b) scale") {
  const std::vector<double> states{0.0, 1.0};
  auto dpi = [](double u, double v) { return expfam::kl_mean(kBern, u, v).nats; };
  const auto base = markov_exponent(iid_rows(0.5), iid_rows(0.4), states, dpi);
  CHECK(base.exponent == doctest::Approx(-std::log(0.5) / std::log(0.6)).epsilon(1e-6));
  const auto scaled = markov_exponent(iid_rows(0.5), iid_rows(0.4), states, dpi, 0.5);
  CHECK(scaled.exponent == doctest::Approx(1.5 * base.exponent).epsilon(1e-9));
}

TEST_CASE("report kinds render") {
  CHECK(to_string(BoundKind::Exact) == "exact");
  CHECK(to_string(BoundKind::LowerBound) == "lower-bound");
}

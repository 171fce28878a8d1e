#include <cmath>
#include <vector>

#include "doctest.h"
#include "tailreg/envproc.hpp"
#include "tailreg/errors.hpp"

using namespace tailreg;
using namespace tailreg::envproc;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd q(2, 2);
  q << a, b, c, d;
  return q;
}

// Mean of n sequential rewards from one arm.
double sample_mean(const RewardProcess& process, std::uint64_t seed, int n) {
  rng::Stream stream = rng::Stream::derive(seed, 0, 0);
  ArmState arm(process, stream);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += arm.next_reward(stream);
  return sum / n;
}

}  // namespace

TEST_CASE("constructors enforce their invariants") {
  CHECK_THROWS_AS(IidGaussian::make(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(IidGaussian::make(0.0, -1.0), DomainError);
  CHECK_THROWS_AS(Ar1Gaussian::make(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Ar1Gaussian::make(0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Ar1Gaussian::make(0.0, 0.5, -1.0), DomainError);
  CHECK_THROWS_AS(IidExpFam::make(expfam::Family::bernoulli(), 1.2), DomainError);
  CHECK_THROWS_AS(FiniteMarkov::make({0.0, 1.0}, mat2(0.5, 0.6, 0.5, 0.5)), DomainError);
  CHECK_THROWS_AS(FiniteMarkov::make({0.0, 1.0}, mat2(1.0, 0.0, 0.5, 0.5)), DomainError);
  CHECK_THROWS_AS(FiniteMarkov::make({0.0, 1.0, 2.0}, mat2(0.5, 0.5, 0.5, 0.5)), DomainError);
  CHECK_THROWS_AS(FiniteMarkov::make({0.0, 1.0}, mat2(1.1, -0.1, 0.5, 0.5)), DomainError);
}

TEST_CASE("irreducibility by reachability") {
  CHECK(is_irreducible(mat2(0.0, 1.0, 1.0, 0.0)));
  CHECK_FALSE(is_irreducible(mat2(1.0, 0.0, 0.3, 0.7)));
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
  q(0, 1) = 1.0;
  q(1, 2) = 1.0;
  q(2, 0) = 1.0;
  CHECK(is_irreducible(q));
}

TEST_CASE("noise-free AR(1) recursion") {
  const RewardProcess p = Ar1Gaussian::make(1.0, 0.5, 0.0, FixedStart{0.0});
  rng::Stream stream(7);
  ArmState arm(p, stream);
  const double expected[] = {1.0, 1.5, 1.75, 1.875, 1.9375};
  for (double e : expected) CHECK(arm.next_reward(stream) == e);
  CHECK(arm.draws() == 5);
}

TEST_CASE("permutation chain alternates") {
  const RewardProcess p = FiniteMarkov::make({0.0, 1.0}, mat2(0, 1, 1, 0), FixedState{0});
  rng::Stream stream(3);
  ArmState arm(p, stream);
  for (int i = 0; i < 10; ++i) CHECK(arm.next_reward(stream) == (i % 2 == 0 ? 1.0 : 0.0));
}

TEST_CASE("long-run means") {
  CHECK(long_run_mean(Ar1Gaussian::make(0.05, 0.5, 1.0)) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(long_run_mean(IidGaussian::make(0.3, 2.0)) == 0.3);
  CHECK(long_run_mean(IidExpFam::make(expfam::Family::poisson(), 2.5)) == 2.5);
  CHECK(long_run_mean(FiniteMarkov::make({0.0, 1.0}, mat2(0.6, 0.4, 0.6, 0.4))) ==
        doctest::Approx(0.4).epsilon(1e-12));
  CHECK(long_run_mean(FiniteMarkov::make({0.0, 1.0}, mat2(0.9, 0.1, 0.2, 0.8))) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("marginal-matched AR(1)") {
  const auto p = Ar1Gaussian::marginal_matched(0.1, 0.6, 1.0);
  CHECK(p.stationary_mean() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p.stationary_variance() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.innovation_variance == doctest::Approx(0.64).epsilon(1e-14));
}

TEST_CASE("stationary distributions") {
  auto check = [](const Eigen::MatrixXd& q, std::vector<double> expected) {
    const Eigen::VectorXd pi = stationary_distribution(q);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(std::abs(pi(static_cast<Eigen::Index>(i)) - expected[i]) < 1e-12);
    }
    const Eigen::RowVectorXd residual = pi.transpose() * q - pi.transpose();
    CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(std::abs(pi.sum() - 1.0) < 1e-14);
  };
  check(mat2(0.6, 0.4, 0.6, 0.4), {0.6, 0.4});
  check(mat2(0, 1, 1, 0), {0.5, 0.5});
  check(mat2(0.9, 0.1, 0.2, 0.8), {2.0 / 3.0, 1.0 / 3.0});
  CHECK_THROWS_AS(stationary_distribution(mat2(1, 0, 0, 1)), DomainError);
}

TEST_CASE("stationary residual on random irreducible chains") {
  rng::Stream stream(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) q(i, j) = 0.05 + stream.uniform01();
      q.row(i) /= q.row(i).sum();
    }
    const Eigen::VectorXd pi = stationary_distribution(q);
    CHECK((pi.transpose() * q - pi.transpose()).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("draw counter advances once per reward") {
  const RewardProcess p = IidExpFam::make(expfam::Family::bernoulli(), 0.3);
  rng::Stream stream(5);
  ArmState arm(p, stream);
  CHECK(arm.draws() == 0);
  for (int i = 1; i <= 17; ++i) {
    arm.next_reward(stream);
    CHECK(arm.draws() == static_cast<std::uint64_t>(i));
  }
}

TEST_CASE("stationary start of AR(1)") {
  const auto process = Ar1Gaussian::make(0.3, 0.7, 0.5);
  const RewardProcess p = process;
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    rng::Stream stream = rng::Stream::derive(42, static_cast<std::uint64_t>(i), 0);
    ArmState arm(p, stream);
    sum += arm.last_value();
    sum_sq += arm.last_value() * arm.last_value();
  }
  const double mu = process.stationary_mean();
  const double var = process.stationary_variance();
  const double mean = sum / n;
  const double sample_var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - mu) < 3.0 * std::sqrt(var / n));
  // Var of the sample variance for a Gaussian is 2σ⁴/(n−1).
  CHECK(std::abs(sample_var - var) < 3.0 * std::sqrt(2.0 * var * var / (n - 1)));
}

TEST_CASE("law of large numbers for every process") {
  const int n = 100000;
  SUBCASE("iid exponential family") {
    const double p = 0.3;
    CHECK(std::abs(sample_mean(IidExpFam::make(expfam::Family::bernoulli(), p), 1, n) - p) <
          5.0 * std::sqrt(p * (1 - p) / n));
    CHECK(std::abs(sample_mean(IidExpFam::make(expfam::Family::poisson(), 2.0), 2, n) - 2.0) <
          5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sample_mean(IidExpFam::make(expfam::Family::exponential(), 1.5), 3, n) - 1.5) <
          5.0 * 1.5 / std::sqrt(n));
    CHECK(std::abs(sample_mean(IidExpFam::make(expfam::Family::gaussian(2.0), -0.4), 4, n) + 0.4) <
          5.0 * std::sqrt(2.0 / n));
  }
  SUBCASE("iid gaussian") {
    CHECK(std::abs(sample_mean(IidGaussian::make(0.25, 3.0), 5, n) - 0.25) < 5.0 * std::sqrt(3.0 / n));
  }
  SUBCASE("AR(1)") {
    const double beta = 0.6;
    const auto process = Ar1Gaussian::make(0.2, beta, 1.0);
    // Long-run variance of the mean: σ²_stat (1+β)/(1−β).
    const double lrv = process.stationary_variance() * (1 + beta) / (1 - beta);
    CHECK(std::abs(sample_mean(process, 6, n) - process.stationary_mean()) < 5.0 * std::sqrt(lrv / n));
  }
  SUBCASE("finite Markov") {
    const auto process = FiniteMarkov::make({0.0, 1.0}, mat2(0.9, 0.1, 0.2, 0.8));
    // Two-state chain: π₀π₁ (1+λ)/(1−λ) with λ = 1 − 0.1 − 0.2.
    const double lambda = 0.7;
    const double lrv = (2.0 / 9.0) * (1 + lambda) / (1 - lambda);
    CHECK(std::abs(sample_mean(process, 7, n) - 1.0 / 3.0) < 5.0 * std::sqrt(lrv / n));
  }
}

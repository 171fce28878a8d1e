#include <cmath>
#include <vector>

#include "doctest.h"
#include "tailreg/errors.hpp"
#include "tailreg/harness.hpp"

using namespace tailreg;
using namespace tailreg::harness;

namespace {

ExperimentConfig gaussian_config(double gap, double var0, std::int64_t horizon, std::int64_t reps) {
  ExperimentConfig c;
  c.arms = {envproc::IidGaussian::make(gap, var0), envproc::IidGaussian::make(0.0, var0)};
  c.horizon = horizon;
  c.replications = reps;
  c.seed = 2024;
  return c;
}

ExperimentConfig bernoulli_config(double p1, double p2, std::int64_t horizon, std::int64_t reps) {
  const auto bern = expfam::Family::bernoulli();
  ExperimentConfig c;
  c.arms = {envproc::IidExpFam::make(bern, p1), envproc::IidExpFam::make(bern, p2)};
  c.policy = KlUcbPolicy{policy::DivergenceSpec::family_kl(bern)};
  c.horizon = horizon;
  c.replications = reps;
  c.seed = 99;
  return c;
}

ExperimentConfig deterministic_ar1(std::int64_t horizon) {
  ExperimentConfig c;
  c.arms = {envproc::Ar1Gaussian::make(0.5, 0.5, 0.0, envproc::FixedStart{0.0}),
            envproc::Ar1Gaussian::make(0.25, 0.5, 0.0, envproc::FixedStart{0.0})};
  c.horizon = horizon;
  c.replications = 3;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = gaussian_config(0.1, 1.0, 100, 10);
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.checkpoints = {50, 20};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = c;
  bad.checkpoints = {50, 200};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = c;
  bad.thresholds = {{0.0, 500.0}, false};
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = c;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = c;
  bad.arms.pop_back();
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = c;
  bad.policy = ThompsonPolicy{0.0};
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("replications are deterministic") {
  const auto c = gaussian_config(0.1, 2.0, 500, 10);
  CHECK(run_replication(c, 3) == run_replication(c, 3));
  CHECK_FALSE(run_replication(c, 3) == run_replication(c, 4));
  auto ts = c;
  ts.policy = ThompsonPolicy{1.0};
  CHECK(run_replication(ts, 5) == run_replication(ts, 5));
}

TEST_CASE("initialization phase fixes T = 2") {
  for (std::int64_t r = 0; r < 20; ++r) {
    const auto res = run_replication(gaussian_config(0.1, 1.0, 2, 20), r);
    CHECK(res.count(0, 0) == 1);
    CHECK(res.count(0, 1) == 1);
  }
}

TEST_CASE("hand-simulated noise-free AR(1) run") {
  // Arm 1 rewards 0.5, 0.75, ...; arm 2 rewards 0.25, 0.375, ...
  // Indices are μ̂ + sqrt(2 ln(t−1)/N) at each play t ≥ 3.
  auto idx = [](double mean, double n, double completed) {
    return mean + std::sqrt(2.0 * std::log(completed) / n);
  };
  std::vector<int> plays = {0, 1};
  CHECK(idx(0.5, 1, 2) > idx(0.25, 1, 2));
  plays.push_back(0);
  CHECK(idx(0.625, 2, 3) < idx(0.25, 1, 3));
  plays.push_back(1);
  CHECK(idx(0.625, 2, 4) > idx(0.3125, 2, 4));
  plays.push_back(0);
  const auto res = run_replication(deterministic_ar1(5), 0);
  CHECK(res.count(0, 0) == 3);
  CHECK(res.count(0, 1) == 2);
  CHECK(res.regret.back() == 2);
  CHECK(res.final_means[0] == doctest::Approx((0.5 + 0.75 + 0.875) / 3).epsilon(1e-15));
  CHECK(res.final_means[1] == doctest::Approx(0.3125).epsilon(1e-15));
}

TEST_CASE("run result invariants") {
  auto c = gaussian_config(0.2, 1.5, 400, 10);
  c.checkpoints = {10, 50, 100, 400};
  for (std::int64_t r = 0; r < 10; ++r) {
    const auto res = run_replication(c, r);
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
      CHECK(res.count(i, 0) + res.count(i, 1) == c.checkpoints[i]);
      CHECK(res.regret[i] == res.count(i, 1));
      if (i > 0) {
        CHECK(res.count(i, 0) >= res.count(i - 1, 0));
        CHECK(res.count(i, 1) >= res.count(i - 1, 1));
      }
    }
  }
}

TEST_CASE("single replication gives a 0/1 estimate") {
  auto c = gaussian_config(0.1, 1.0, 200, 1);
  c.thresholds = {{0.1, 0.3, 0.5, 0.7}, true};
  for (const auto& e : estimate_tail(c)) CHECK((e.p_hat == 0.0 || e.p_hat == 1.0));
}

TEST_CASE("nested events give a non-increasing estimate in x") {
  auto c = gaussian_config(0.1, 2.0, 300, 2000);
  c.checkpoints = {100, 300};
  for (int i = 1; i <= 19; ++i) c.thresholds.values.push_back(0.05 * i);
  c.thresholds.values.erase(c.thresholds.values.begin());
  const auto table = count_hits(c);
  for (std::size_t cp = 0; cp < 2; ++cp) {
    for (std::size_t i = 1; i < table.per_checkpoint; ++i) {
      CHECK(table.hits[cp * table.per_checkpoint + i] <= table.hits[cp * table.per_checkpoint + i - 1]);
    }
  }
}

TEST_CASE("exponent is finite iff hits > 0 and x > 1") {
  const auto e = make_tail_estimate(100, 50.0, 7, 1000, std::log(50.0));
  CHECK(e.exponent.has_value());
  CHECK(*e.exponent == doctest::Approx(std::log(0.007) / std::log(50.0)));
  CHECK(*e.exponent_ci_lo < *e.exponent);
  CHECK(*e.exponent_ci_hi > *e.exponent);
  const auto censored = make_tail_estimate(100, 50.0, 0, 1000, std::log(50.0));
  CHECK_FALSE(censored.exponent.has_value());
  CHECK(censored.censored);
  CHECK(*censored.censored_bound == doctest::Approx(std::log(3.0 / 1000) / std::log(50.0)));
  CHECK_FALSE(make_tail_estimate(100, 1.0, 7, 1000, std::log(1.0)).exponent.has_value());
}

TEST_CASE("Wilson interval") {
  const auto ci = wilson_interval(10, 100);
  // Reference values of the score interval for 10/100.
  CHECK(ci.lo == doctest::Approx(0.05522914).epsilon(1e-6));
  CHECK(ci.hi == doctest::Approx(0.17436566).epsilon(1e-6));
  CHECK(wilson_interval(0, 50).lo == 0.0);
  CHECK(wilson_interval(50, 50).hi == 1.0);
}

TEST_CASE("fixed-fraction curve uses ln T") {
  auto c = gaussian_config(0.1, 2.0, 20, 5000);
  c.checkpoints = {10, 20};
  const auto curve = exponent_curve_fixed_frac(c, 0.5);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].horizon == 10);
  CHECK(curve[0].threshold == 5.0);
  REQUIRE(curve[0].estimate.exponent.has_value());
  CHECK(*curve[0].estimate.exponent == doctest::Approx(std::log(curve[0].estimate.p_hat) / std::log(10.0)).epsilon(1e-14));
  CHECK(*curve[1].estimate.exponent == doctest::Approx(std::log(curve[1].estimate.p_hat) / std::log(20.0)).epsilon(1e-14));
}

TEST_CASE("fixed-T curve defaults to fractions 0.05..0.95") {
  auto c = gaussian_config(0.1, 2.0, 200, 500);
  c.thresholds.values.clear();
  const auto curve = exponent_curve_fixed_T(c);
  REQUIRE(curve.size() == 19);
  CHECK(curve.front().threshold == doctest::Approx(10.0));
  CHECK(curve.back().threshold == doctest::Approx(190.0));
  for (const auto& p : curve) {
    if (p.estimate.exponent) {
      CHECK(*p.estimate.exponent == doctest::Approx(std::log(p.estimate.p_hat) / std::log(p.threshold)).epsilon(1e-14));
    }
  }
}

TEST_CASE("serial and parallel kernels agree exactly") {
  auto c = gaussian_config(0.1, 2.5, 300, 3000);
  c.checkpoints = {50, 150, 300};
  c.thresholds = {{0.3, 0.5, 0.8}, true};
  const auto serial = count_hits_serial(c);
  for (int workers : {1, 2, 4, 7}) {
    c.workers = workers;
    CHECK(count_hits(c) == serial);
  }
  auto ts = c;
  ts.policy = ThompsonPolicy{1.0};
  ts.workers = 1;
  const auto ts_serial = count_hits_serial(ts);
  ts.workers = 4;
  CHECK(count_hits(ts) == ts_serial);
}

TEST_CASE("run_all is ordered by replication and worker-independent") {
  auto c = gaussian_config(0.1, 1.0, 100, 200);
  const auto one = run_all(c);
  c.workers = 4;
  const auto four = run_all(c);
  CHECK(one == four);
  for (std::size_t r = 0; r < one.size(); ++r) CHECK(one[r].replication == static_cast<std::int64_t>(r));
}

TEST_CASE("exact enumeration oracle") {
  const auto bern = policy::DivergenceSpec::family_kl(expfam::Family::bernoulli());
  CHECK(exact_tail_bernoulli(0.6, 0.3, bern, 2, 1.0) == 1.0);
  CHECK(exact_tail_bernoulli(0.6, 0.3, bern, 2, 2.0) == 0.0);
  CHECK(exact_tail_bernoulli(1.0 - 1e-12, 1e-12, bern, 6, 2.0) < 1e-10);
  CHECK_THROWS_AS(exact_tail_bernoulli(0.6, 0.3, bern, 21, 5.0), UsageError);

  const auto law = exact_regret_distribution_bernoulli(0.6, 0.3, bern, 10);
  double total = 0.0;
  for (double p : law) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(law[0] == 0.0);
  CHECK(law[10] == 0.0);

  // Frozen at the first run of the enumeration.
  CHECK(exact_tail_bernoulli(0.6, 0.3, bern, 10, 5.0) == doctest::Approx(0.212586496).epsilon(1e-12));
}

TEST_CASE("Monte Carlo agrees with the enumeration oracle") {
  const auto bern = policy::DivergenceSpec::family_kl(expfam::Family::bernoulli());
  auto c = bernoulli_config(0.6, 0.3, 10, 20000);
  c.thresholds = {{5.0}, false};
  const auto e = estimate_tail(c).front();
  const double exact = exact_tail_bernoulli(0.6, 0.3, bern, 10, 5.0);
  const double half = 0.5 * (e.ci_hi - e.ci_lo);
  CHECK(std::abs(e.p_hat - exact) <= 3.0 * half);
}

TEST_CASE("conditional diagnostics") {
  SUBCASE("event always occurs") {
    auto c = deterministic_ar1(5);
    const auto r = conditional_diagnostics(c, 2.0);
    CHECK(r.conditioned == r.reps);
    CHECK(r.mean_optimal == r.unconditional_mean_optimal);
    CHECK(r.mean_suboptimal == r.unconditional_mean_suboptimal);
  }
  SUBCASE("x = 1 is vacuous") {
    auto c = gaussian_config(0.1, 2.0, 200, 300);
    const auto r = conditional_diagnostics(c, 1.0);
    CHECK(r.conditioned == 300);
    CHECK(r.mean_optimal == doctest::Approx(r.unconditional_mean_optimal).epsilon(1e-14));
    CHECK(r.mean_suboptimal == doctest::Approx(r.unconditional_mean_suboptimal).epsilon(1e-14));
  }
  SUBCASE("no conditioning events is censored") {
    auto c = deterministic_ar1(5);
    const auto r = conditional_diagnostics(c, 5.0);
    CHECK(r.conditioned == 0);
    CHECK(r.censored);
  }
  SUBCASE("x outside [1, T]") {
    CHECK_THROWS_AS(conditional_diagnostics(deterministic_ar1(5), 6.0), UsageError);
  }
}

TEST_CASE("moment estimates") {
  SUBCASE("p = 1 is the average regret") {
    auto c = gaussian_config(0.5, 1.0, 100, 400);
    const auto runs = run_all(c);
    double sum = 0.0;
    for (const auto& r : runs) sum += static_cast<double>(r.regret.back());
    CHECK(moment_estimate(c, 1.0).front().mean == doctest::Approx(sum / 400).epsilon(1e-14));
  }
  SUBCASE("deterministic regret") {
    auto c = deterministic_ar1(5);
    const auto m = moment_estimate(c, 1.5).front();
    CHECK(m.mean == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
    CHECK(m.ci_lo == doctest::Approx(m.mean).epsilon(1e-12));
  }
  CHECK_THROWS_AS(moment_estimate(deterministic_ar1(5), 0.5), UsageError);
}

TEST_CASE("log-normalized median") {
  auto c = deterministic_ar1(5);
  CHECK(log_normalized_median(c).front() == doctest::Approx(2.0 / std::log(5.0)).epsilon(1e-14));
}

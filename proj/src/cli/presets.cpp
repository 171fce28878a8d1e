#include "tailreg/cli/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tailreg/errors.hpp"

namespace tailreg::cli {
namespace {

using envproc::Ar1Gaussian;
using envproc::IidExpFam;
using envproc::IidGaussian;
using harness::EventKind;
using harness::ExperimentConfig;
using harness::ExponentScale;
using harness::KlUcbPolicy;

constexpr double kGap = 0.1;

std::string label(const char* name, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%g", name, value);
  return buf;
}

std::vector<double> fractions_05_to_95() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

KlUcbPolicy gaussian_policy(double variance, double b = 0.0) {
  return {policy::DivergenceSpec::family_kl(expfam::Family::gaussian(variance), b)};
}

// N(T) ≥ 0.8T against ln T over a checkpoint grid.
ExperimentConfig fixed_fraction_base() {
  ExperimentConfig c;
  c.horizon = 4000;
  c.checkpoints = {250, 500, 1000, 2000, 4000};
  c.thresholds = {{0.8}, true};
  c.event = EventKind::AtLeast;
  c.scale = ExponentScale::LogHorizon;
  c.replications = 100000;
  c.seed = 7;
  return c;
}

// N(T) > x against ln x for x in [0.05T, 0.95T].
ExperimentConfig fixed_horizon_base(std::int64_t horizon) {
  ExperimentConfig c;
  c.horizon = horizon;
  c.thresholds = {fractions_05_to_95(), true};
  c.event = EventKind::Greater;
  c.scale = ExponentScale::LogThreshold;
  c.replications = 100000;
  c.seed = 7;
  return c;
}

// Equilibrium N(mean, 1); β₀ = 0 is the iid case.
envproc::RewardProcess matched_arm(double mean, double beta) {
  if (beta == 0.0) return IidGaussian::make(mean, 1.0);
  return Ar1Gaussian::marginal_matched(mean, beta, 1.0);
}

Curve finish(Curve curve, const std::string& experiment, std::string param) {
  curve.config.experiment = experiment;
  curve.config.curve_param = std::move(param);
  if (curve.analytic) curve.config.analytic_exponent = curve.analytic->exponent;
  return curve;
}

Preset fig1() {
  Preset p{"fig1", "Gaussian KL-UCB (unit variance) on N(0.1, s0^2) vs N(0, s0^2)", {}};
  for (int i = 0; i <= 6; ++i) {
    const double var0 = 1.0 + 0.5 * i;
    Curve c;
    c.config = fixed_fraction_base();
    c.config.arms = {IidGaussian::make(kGap, var0), IidGaussian::make(0.0, var0)};
    c.config.policy = gaussian_policy(1.0);
    c.analytic = exponents::gaussian_misspec_exponent(1.0, var0);
    p.curves.push_back(finish(std::move(c), p.id, label("sigma0_sq", var0)));
  }
  return p;
}

Preset fig2() {
  Preset p{"fig2", "Gaussian KL-UCB on marginal-matched AR(1) arms N(0.1,1) vs N(0,1)", {}};
  for (int i = 0; i <= 6; ++i) {
    const double beta = 0.15 * i;
    Curve c;
    c.config = fixed_fraction_base();
    c.config.arms = {matched_arm(kGap, beta), matched_arm(0.0, beta)};
    c.config.policy = gaussian_policy(1.0);
    c.analytic = beta == 0.0 ? exponents::gaussian_misspec_exponent(1.0, 1.0)
                             : exponents::ar1_marginal_matched(beta);
    p.curves.push_back(finish(std::move(c), p.id, label("beta0", beta)));
  }
  return p;
}

Preset fig3(const std::string& id, double p1, std::int64_t horizon) {
  const auto bern = expfam::Family::bernoulli();
  Preset p{id, "Bernoulli KL-UCB on Ber(p) vs Ber(0.4)", {}};
  Curve c;
  c.config = fixed_horizon_base(horizon);
  c.config.replications = 10000;
  c.config.arms = {IidExpFam::make(bern, p1), IidExpFam::make(bern, 0.4)};
  c.config.policy = KlUcbPolicy{policy::DivergenceSpec::family_kl(bern)};
  c.analytic = exponents::wellspec_expfam_exponent(bern, p1, 0.4);
  p.curves.push_back(finish(std::move(c), p.id, label("p", p1)));
  return p;
}

Preset fig4() {
  Preset p{"fig4", "Gaussian KL-UCB with exploration scaled by (1+b) on N(0.1,1) vs N(0,1)", {}};
  for (double b : {0.0, 0.25, 0.5, 0.75}) {
    Curve c;
    c.config = fixed_horizon_base(7000);
    c.config.arms = {IidGaussian::make(kGap, 1.0), IidGaussian::make(0.0, 1.0)};
    c.config.policy = gaussian_policy(1.0, b);
    c.analytic = exponents::wellspec_expfam_exponent(expfam::Family::gaussian(1.0), kGap, 0.0, b);
    p.curves.push_back(finish(std::move(c), p.id, label("b", b)));
  }
  return p;
}

Preset fig5() {
  Preset p{"fig5", "Gaussian KL-UCB scaled by 1.1(1+beta0)/(1-beta0) on AR(1) arms", {}};
  for (double beta : {0.0, 0.15, 0.3, 0.45}) {
    const double b = 1.1 * (1.0 + beta) / (1.0 - beta) - 1.0;
    Curve c;
    c.config = fixed_horizon_base(10000);
    c.config.arms = {matched_arm(kGap, beta), matched_arm(0.0, beta)};
    c.config.policy = gaussian_policy(1.0, b);
    c.analytic = beta == 0.0 ? exponents::gaussian_misspec_exponent(1.0, 1.0, b)
                             : exponents::ar1_marginal_matched(beta, b);
    p.curves.push_back(finish(std::move(c), p.id, label("beta0", beta)));
  }
  return p;
}

Preset wlln() {
  Preset p{"wlln", "median N2(T)/ln T against 1/D for Gaussian arms with gap 1", {}};
  // Well-specified and over-stated policy variance; the constant is 1/D^pi.
  const double gap = 1.0;
  for (double var : {1.0, 2.0}) {
    Curve c;
    c.analysis = Analysis::Wlln;
    c.config.arms = {IidGaussian::make(gap, 1.0), IidGaussian::make(0.0, 1.0)};
    c.config.policy = gaussian_policy(var);
    c.config.horizon = 100000;
    c.config.checkpoints = {1000, 10000, 100000};
    c.config.replications = 200;
    c.config.seed = 7;
    c.target = 2.0 * var / (gap * gap);
    p.curves.push_back(finish(std::move(c), p.id, label("policy_var", var)));
  }
  return p;
}

Preset moments() {
  Preset p{"moments", "E[N2(T)^1.5] for well-specified Gaussian arms with gap 1", {}};
  Curve c;
  c.analysis = Analysis::Moments;
  c.moment_order = 1.5;
  c.config.arms = {IidGaussian::make(1.0, 1.0), IidGaussian::make(0.0, 1.0)};
  c.config.policy = gaussian_policy(1.0);
  c.config.horizon = 2000;
  c.config.checkpoints = {500, 1000, 2000};
  c.config.replications = 100000;
  c.config.seed = 7;
  p.curves.push_back(finish(std::move(c), p.id, label("p", 1.5)));
  return p;
}

Preset conditional() {
  Preset p{"conditional", "sample means given N2(T) >= T/2, Gaussian policy on N(.,4) arms", {}};
  Curve c;
  c.analysis = Analysis::Conditional;
  c.condition_fraction = 0.5;
  c.config.arms = {IidGaussian::make(kGap, 4.0), IidGaussian::make(0.0, 4.0)};
  c.config.policy = gaussian_policy(1.0);
  c.config.horizon = 2000;
  c.config.replications = 4000;
  c.config.seed = 7;
  c.analytic = exponents::gaussian_misspec_exponent(1.0, 4.0);
  p.curves.push_back(finish(std::move(c), p.id, label("sigma0_sq", 4.0)));
  return p;
}

Preset markov_preset() {
  const auto bern = expfam::Family::bernoulli();
  Preset p{"markov", "Bernoulli KL-UCB on a sticky {0,1} Markov arm vs Ber(0.4)", {}};
  Eigen::MatrixXd q1(2, 2);
  q1 << 0.4, 0.6, 0.3, 0.7;
  Eigen::MatrixXd q2(2, 2);
  q2 << 0.6, 0.4, 0.6, 0.4;
  const std::vector<double> states{0.0, 1.0};
  Curve c;
  c.config = fixed_horizon_base(5000);
  c.config.replications = 10000;
  c.config.arms = {envproc::FiniteMarkov::make(states, q1),
                   envproc::FiniteMarkov::make(states, q2)};
  c.config.policy = KlUcbPolicy{policy::DivergenceSpec::family_kl(bern)};
  c.analytic = exponents::markov_exponent(
      q1, q2, states,
      [bern](double u, double v) { return expfam::kl_mean(bern, u, v).nats; });
  p.curves.push_back(finish(std::move(c), p.id, "q1=sticky"));
  return p;
}

}  // namespace

std::string_view to_string(Analysis analysis) noexcept {
  switch (analysis) {
    case Analysis::Tail: return "tail";
    case Analysis::Wlln: return "wlln";
    case Analysis::Moments: return "moments";
    case Analysis::Conditional: return "conditional";
  }
  return "tail";
}

Analysis parse_analysis(std::string_view text) {
  for (auto a : {Analysis::Tail, Analysis::Wlln, Analysis::Moments, Analysis::Conditional}) {
    if (text == to_string(a)) return a;
  }
  throw UsageError("unknown analysis '" + std::string(text) + "'");
}

std::vector<std::string> preset_ids() {
  return {"fig1", "fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5",
          "wlln", "moments", "conditional", "markov"};
}

Preset make_preset(std::string_view id) {
  if (id == "fig1") return fig1();
  if (id == "fig2") return fig2();
  if (id == "fig3a") return fig3("fig3a", 0.475, 10000);
  if (id == "fig3b") return fig3("fig3b", 0.5, 5000);
  if (id == "fig3c") return fig3("fig3c", 0.525, 3400);
  if (id == "fig4") return fig4();
  if (id == "fig5") return fig5();
  if (id == "wlln") return wlln();
  if (id == "moments") return moments();
  if (id == "conditional") return conditional();
  if (id == "markov") return markov_preset();
  std::string known;
  for (const auto& p : preset_ids()) known += (known.empty() ? "" : ", ") + p;
  throw UsageError("unknown preset '" + std::string(id) + "' (known: " + known + ")");
}

void apply_overrides(std::vector<Curve>& curves, const Overrides& o) {
  for (auto& curve : curves) {
    auto& c = curve.config;
    if (o.horizon) {
      if (*o.horizon < 2) throw UsageError("--T must be at least 2");
      c.horizon = *o.horizon;
      if (!c.checkpoints.empty()) {
        std::erase_if(c.checkpoints, [&](std::int64_t t) { return t >= c.horizon; });
        c.checkpoints.push_back(c.horizon);
      }
      if (!c.thresholds.fractional) {
        std::erase_if(c.thresholds.values,
                      [&](double x) { return x > static_cast<double>(c.horizon); });
      }
    }
    if (o.replications) {
      if (*o.replications < 1) throw UsageError("--reps must be at least 1");
      c.replications = *o.replications;
    }
    if (o.seed) c.seed = *o.seed;
    if (o.workers) {
      if (*o.workers < 1) throw UsageError("--workers must be at least 1");
      c.workers = *o.workers;
    }
    if (o.x_grid) {
      if (curve.analysis == Analysis::Conditional) {
        if (o.x_grid->size() != 1) throw UsageError("--x-grid: conditional runs take one fraction");
        curve.condition_fraction = o.x_grid->front();
      } else {
        c.thresholds = {*o.x_grid, true};
      }
    }
    c.validate();
  }
}

}  // namespace tailreg::cli

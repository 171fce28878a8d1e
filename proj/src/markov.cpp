#include "tailreg/markov.hpp"

#include <cmath>
#include <sstream>

#include "tailreg/envproc.hpp"
#include "tailreg/errors.hpp"
#include "tailreg/infimum.hpp"

namespace tailreg::markov {
namespace {

constexpr int kMaxIterations = 100000;

void check_states(const Eigen::MatrixXd& transition,
                  std::span<const double> states) {
  if (static_cast<Eigen::Index>(states.size()) != transition.rows()) {
    throw DomainError("markov: state list and transition size disagree");
  }
}

Eigen::MatrixXd normalize_rows(Eigen::MatrixXd m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).sum();
  return m;
}

}  // namespace

PfEigen pf_eig(const Eigen::MatrixXd& transition, std::span<const double> states,
               double theta) {
  envproc::validate_transition(transition);
  check_states(transition, states);
  const Eigen::Index n = transition.rows();
  Eigen::VectorXd weight(n);
  for (Eigen::Index y = 0; y < n; ++y) {
    weight(y) = std::exp(theta * states[static_cast<std::size_t>(y)]);
  }
  const Eigen::MatrixXd m = transition * weight.asDiagonal();

  // Shifted iteration on M + sI. The shift tracks the Collatz-Wielandt bracket
  // [min (Mv)/v, max (Mv)/v] around φ, which keeps φ + s dominant and sends
  // the −φ eigenvalue of period-2 chains toward zero.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd mv = m * v;
  double shift = 0.5 * mv.maxCoeff();
  double phi = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::VectorXd next = mv + shift * v;
    v = next / next.lpNorm<Eigen::Infinity>();
    mv = m * v;
    phi = mv.lpNorm<Eigen::Infinity>();
    residual = (mv - phi * v).lpNorm<Eigen::Infinity>();
    if (residual <= 1e-13 * phi) {
      v /= v(0);
      return {phi, v};
    }
    const Eigen::ArrayXd ratio = mv.array() / v.array();
    if (ratio.allFinite() && ratio.minCoeff() > 0.0) {
      shift = 0.5 * (ratio.minCoeff() + ratio.maxCoeff());
    }
  }
  std::ostringstream msg;
  msg << "pf_eig: power iteration did not converge at theta=" << theta
      << " (residual " << residual << ")";
  throw NumericError(msg.str(), residual);
}

Eigen::MatrixXd tilt_transition(const Eigen::MatrixXd& transition,
                                std::span<const double> states, double theta) {
  if (theta == 0.0) {
    envproc::validate_transition(transition);
    check_states(transition, states);
    return normalize_rows(transition);
  }
  const PfEigen pf = pf_eig(transition, states, theta);
  const Eigen::Index n = transition.rows();
  Eigen::MatrixXd tilted(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      tilted(x, y) = pf.v(y) / pf.v(x) *
                     std::exp(theta * states[static_cast<std::size_t>(y)]) *
                     transition(x, y) / pf.phi;
    }
  }
  return normalize_rows(tilted);
}

double stationary_mean(const Eigen::MatrixXd& transition,
                       std::span<const double> states) {
  check_states(transition, states);
  const Eigen::VectorXd pi = envproc::stationary_distribution(transition);
  double mean = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    mean += pi(static_cast<Eigen::Index>(i)) * states[i];
  }
  return mean;
}

TiltedChain tilt_to_mean(const Eigen::MatrixXd& transition,
                         std::span<const double> states, double z) {
  envproc::validate_transition(transition);
  check_states(transition, states);
  double lo_state = states[0];
  double hi_state = states[0];
  for (double s : states) {
    lo_state = std::min(lo_state, s);
    hi_state = std::max(hi_state, s);
  }
  if (!(z > lo_state && z < hi_state)) {
    std::ostringstream msg;
    msg << "markov tilt: target mean " << z << " outside (" << lo_state << ", "
        << hi_state << ")";
    throw DomainError(msg.str());
  }
  auto mean_at = [&](double theta) {
    return stationary_mean(tilt_transition(transition, states, theta), states);
  };
  auto finish = [&](double theta) {
    TiltedChain out;
    out.theta = theta;
    if (theta == 0.0) {
      out.phi = 1.0;
      out.v = Eigen::VectorXd::Ones(transition.rows());
    } else {
      PfEigen pf = pf_eig(transition, states, theta);
      out.phi = pf.phi;
      out.v = std::move(pf.v);
    }
    out.transition = tilt_transition(transition, states, theta);
    out.mean = stationary_mean(out.transition, states);
    return out;
  };

  const double base_mean = mean_at(0.0);
  if (std::abs(base_mean - z) <= 1e-12 * std::max(1.0, std::abs(z))) {
    return finish(0.0);
  }
  // Bracket by doubling away from 0, capped at |θ| = kThetaCap.
  double lo = 0.0;
  double hi = 0.0;
  const double direction = z > base_mean ? 1.0 : -1.0;
  double step = 1.0;
  for (;;) {
    const double probe = direction * std::min(step, kThetaCap);
    const double m = mean_at(probe);
    if ((direction > 0 && m >= z) || (direction < 0 && m <= z)) {
      (direction > 0 ? hi : lo) = probe;
      break;
    }
    (direction > 0 ? lo : hi) = probe;
    if (step >= kThetaCap) {
      std::ostringstream msg;
      msg << "markov tilt: mean " << z << " not reachable with |theta| <= "
          << kThetaCap;
      throw DomainError(msg.str());
    }
    step *= 2.0;
  }

  double theta = 0.5 * (lo + hi);
  double err = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    theta = 0.5 * (lo + hi);
    const double m = mean_at(theta);
    err = m - z;
    if (std::abs(err) <= 1e-13 * std::max(1.0, std::abs(z))) break;
    if (m < z) {
      lo = theta;
    } else {
      hi = theta;
    }
    if (!(hi - lo > 4.0 * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::abs(theta)))) {
      break;
    }
  }
  if (std::abs(err) > 1e-9) {
    throw NumericError("markov tilt: bisection failed to reach the target mean",
                       err);
  }
  return finish(theta);
}

expfam::KlValue markov_kl(const Eigen::MatrixXd& tilted,
                          const Eigen::MatrixXd& base,
                          std::span<const double> states) {
  envproc::validate_transition(base);
  check_states(base, states);
  if (tilted.rows() != base.rows() || tilted.cols() != base.cols()) {
    throw DomainError("markov_kl: transition sizes disagree");
  }
  for (Eigen::Index x = 0; x < base.rows(); ++x) {
    for (Eigen::Index y = 0; y < base.cols(); ++y) {
      if (base(x, y) == 0.0 && tilted(x, y) > 0.0) {
        std::ostringstream msg;
        msg << "markov_kl: entry (" << x << "," << y
            << ") has positive probability under the first chain but zero "
               "under the second";
        throw DomainError(msg.str());
      }
    }
  }
  const Eigen::VectorXd pi = envproc::stationary_distribution(tilted);
  double rate = 0.0;
  for (Eigen::Index x = 0; x < base.rows(); ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < base.cols(); ++y) {
      const double q = tilted(x, y);
      if (q > 0.0) row += q * std::log(q / base(x, y));
    }
    rate += pi(x) * row;
  }
  return {rate > 0.0 ? rate : 0.0};
}

double markov_tail_exponent(const Eigen::MatrixXd& optimal,
                            const Eigen::MatrixXd& suboptimal,
                            std::span<const double> states,
                            const MeanDivergence& policy_divergence) {
  const double mu1 = stationary_mean(optimal, states);
  const double mu2 = stationary_mean(suboptimal, states);
  if (!(mu1 > mu2)) {
    throw UsageError("markov exponent: the first chain must have the larger mean");
  }
  const double lower = stationary_mean(
      tilt_transition(optimal, states, -kThetaCap), states);
  auto ratio = [&](double z) {
    const TiltedChain chain = tilt_to_mean(optimal, states, z);
    return markov_kl(chain.transition, optimal, states).nats /
           policy_divergence(z, mu2);
  };
  const auto inf = numeric::infimum_below(ratio, mu2, lower);
  return -inf.value;
}

}  // namespace tailreg::markov

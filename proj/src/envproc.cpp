#include "tailreg/envproc.hpp"

#include <cmath>
#include <sstream>

#include "tailreg/errors.hpp"

namespace tailreg::envproc {
namespace {

enum ProcessIndex : std::size_t { kIidExpFam = 0, kIidGaussian, kAr1, kMarkov };

}  // namespace

IidExpFam IidExpFam::make(const expfam::Family& family, double mean) {
  expfam::require_mean(family, mean);
  return {family, mean};
}

IidGaussian IidGaussian::make(double mean, double variance) {
  if (!std::isfinite(mean)) throw DomainError("iid gaussian: mean must be finite");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    std::ostringstream msg;
    msg << "iid gaussian: variance must be positive, got " << variance;
    throw DomainError(msg.str());
  }
  return {mean, variance};
}

Ar1Gaussian Ar1Gaussian::make(double alpha, double beta,
                              double innovation_variance,
                              std::variant<StationaryStart, FixedStart> init) {
  if (!(beta > 0.0 && beta < 1.0)) {
    std::ostringstream msg;
    msg << "ar1: coefficient beta must lie in (0, 1), got " << beta;
    throw DomainError(msg.str());
  }
  if (!(innovation_variance >= 0.0) || !std::isfinite(innovation_variance)) {
    throw DomainError("ar1: innovation variance must be non-negative");
  }
  if (!std::isfinite(alpha)) throw DomainError("ar1: alpha must be finite");
  return {alpha, beta, innovation_variance, init};
}

Ar1Gaussian Ar1Gaussian::marginal_matched(double long_run_mean, double beta,
                                          double marginal_variance) {
  if (!(marginal_variance > 0.0)) {
    throw DomainError("ar1: marginal variance must be positive");
  }
  return make(long_run_mean * (1.0 - beta), beta,
              marginal_variance * (1.0 - beta * beta));
}

bool is_irreducible(const Eigen::MatrixXd& transition) {
  const auto n = static_cast<std::size_t>(transition.rows());
  for (std::size_t source = 0; source < n; ++source) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> frontier{source};
    seen[source] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const std::size_t x = frontier.back();
      frontier.pop_back();
      for (std::size_t y = 0; y < n; ++y) {
        if (!seen[y] && transition(static_cast<Eigen::Index>(x),
                                   static_cast<Eigen::Index>(y)) > 0.0) {
          seen[y] = true;
          ++reached;
          frontier.push_back(y);
        }
      }
    }
    if (reached != n) return false;
  }
  return true;
}

void validate_transition(const Eigen::MatrixXd& transition) {
  if (transition.rows() == 0 || transition.rows() != transition.cols()) {
    throw DomainError("transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < transition.rows(); ++i) {
    for (Eigen::Index j = 0; j < transition.cols(); ++j) {
      const double q = transition(i, j);
      if (!(q >= 0.0) || !std::isfinite(q)) {
        std::ostringstream msg;
        msg << "transition entry (" << i << "," << j << ") = " << q
            << " is not a probability";
        throw DomainError(msg.str());
      }
    }
    const double row_sum = transition.row(i).sum();
    if (std::abs(row_sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "transition row " << i << " sums to " << row_sum;
      throw DomainError(msg.str());
    }
  }
  if (!is_irreducible(transition)) {
    throw DomainError("transition matrix is reducible");
  }
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  validate_transition(transition);
  const Eigen::Index n = transition.rows();
  // Solve (Qᵀ − I) π = 0 with the last equation replaced by Σπ = 1.
  Eigen::MatrixXd system =
      transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = system.fullPivLu().solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  pi /= pi.sum();
  return pi;
}

FiniteMarkov FiniteMarkov::make(std::vector<double> states,
                                Eigen::MatrixXd transition,
                                std::variant<StationaryStart, FixedState> init) {
  if (static_cast<Eigen::Index>(states.size()) != transition.rows()) {
    throw DomainError("markov: state list and transition size disagree");
  }
  for (double s : states) {
    if (!std::isfinite(s)) throw DomainError("markov: state values must be finite");
  }
  if (const auto* fixed = std::get_if<FixedState>(&init);
      fixed && fixed->index >= states.size()) {
    throw DomainError("markov: initial state index out of range");
  }
  FiniteMarkov chain{std::move(states), std::move(transition), init, {}, {}};
  chain.stationary = stationary_distribution(chain.transition);
  const Eigen::Index n = chain.transition.rows();
  chain.cumulative.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double running = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      running += chain.transition(i, j);
      chain.cumulative(i, j) = running;
    }
  }
  return chain;
}

double long_run_mean(const RewardProcess& process) {
  switch (process.index()) {
    case kIidExpFam:
      return std::get<IidExpFam>(process).mean;
    case kIidGaussian:
      return std::get<IidGaussian>(process).mean;
    case kAr1:
      return std::get<Ar1Gaussian>(process).stationary_mean();
    case kMarkov: {
      const auto& chain = std::get<FiniteMarkov>(process);
      const Eigen::VectorXd pi = stationary_distribution(chain.transition);
      double mean = 0.0;
      for (std::size_t i = 0; i < chain.states.size(); ++i) {
        mean += pi(static_cast<Eigen::Index>(i)) * chain.states[i];
      }
      return mean;
    }
    default:
      return 0.0;
  }
}

ArmState::ArmState(const RewardProcess& process, rng::Stream& stream)
    : process_(&process), kind_(process.index()) {
  switch (kind_) {
    case kIidExpFam: {
      const auto& p = std::get<IidExpFam>(process);
      switch (p.family.kind()) {
        case expfam::Kind::GaussianKnownVar:
          location_ = p.mean;
          scale_ = std::sqrt(p.family.variance());
          break;
        case expfam::Kind::Bernoulli:
          location_ = p.mean;
          break;
        case expfam::Kind::Poisson:
          poisson_ = boost::random::poisson_distribution<int, double>(p.mean);
          break;
        case expfam::Kind::Exponential:
          exponential_ = boost::random::exponential_distribution<double>(1.0 / p.mean);
          break;
      }
      break;
    }
    case kIidGaussian: {
      const auto& p = std::get<IidGaussian>(process);
      location_ = p.mean;
      scale_ = std::sqrt(p.variance);
      break;
    }
    case kAr1: {
      const auto& p = std::get<Ar1Gaussian>(process);
      scale_ = std::sqrt(p.innovation_variance);
      if (const auto* fixed = std::get_if<FixedStart>(&p.init)) {
        value_ = fixed->x0;
      } else {
        value_ = p.stationary_mean() +
                 std::sqrt(p.stationary_variance()) * normal_(stream);
      }
      break;
    }
    case kMarkov: {
      const auto& p = std::get<FiniteMarkov>(process);
      if (const auto* fixed = std::get_if<FixedState>(&p.init)) {
        chain_state_ = fixed->index;
      } else {
        const double u = stream.uniform01();
        double running = 0.0;
        chain_state_ = p.states.size() - 1;
        for (std::size_t i = 0; i < p.states.size(); ++i) {
          running += p.stationary(static_cast<Eigen::Index>(i));
          if (u < running) {
            chain_state_ = i;
            break;
          }
        }
      }
      value_ = p.states[chain_state_];
      break;
    }
  }
}

std::size_t ArmState::sample_row(std::size_t row, rng::Stream& stream) const {
  const auto& p = std::get<FiniteMarkov>(*process_);
  const double u = stream.uniform01();
  const auto r = static_cast<Eigen::Index>(row);
  const Eigen::Index n = p.cumulative.cols();
  for (Eigen::Index j = 0; j < n - 1; ++j) {
    if (u < p.cumulative(r, j)) return static_cast<std::size_t>(j);
  }
  // Rounding in the cumulative sum: fall back to the last positive entry.
  for (Eigen::Index j = n - 1; j > 0; --j) {
    if (p.transition(r, j) > 0.0) return static_cast<std::size_t>(j);
  }
  return 0;
}

double ArmState::next_reward(rng::Stream& stream) {
  ++draws_;
  switch (kind_) {
    case kIidExpFam: {
      const auto& p = std::get<IidExpFam>(*process_);
      switch (p.family.kind()) {
        case expfam::Kind::GaussianKnownVar:
          return location_ + scale_ * normal_(stream);
        case expfam::Kind::Bernoulli:
          return stream.uniform01() < location_ ? 1.0 : 0.0;
        case expfam::Kind::Poisson:
          return static_cast<double>(poisson_(stream));
        case expfam::Kind::Exponential:
          return exponential_(stream);
      }
      return 0.0;
    }
    case kIidGaussian:
      return location_ + scale_ * normal_(stream);
    case kAr1: {
      const auto& p = std::get<Ar1Gaussian>(*process_);
      const double noise = scale_ > 0.0 ? scale_ * normal_(stream) : 0.0;
      value_ = p.alpha + p.beta * value_ + noise;
      return value_;
    }
    case kMarkov: {
      const auto& p = std::get<FiniteMarkov>(*process_);
      chain_state_ = sample_row(chain_state_, stream);
      value_ = p.states[chain_state_];
      return value_;
    }
  }
  return 0.0;
}

}  // namespace tailreg::envproc

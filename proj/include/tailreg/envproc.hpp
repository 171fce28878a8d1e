#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "tailreg/expfam.hpp"
#include "tailreg/rng.hpp"

namespace tailreg::envproc {

struct StationaryStart {
  friend bool operator==(const StationaryStart&, const StationaryStart&) = default;
};
struct FixedStart {
  double x0;
  friend bool operator==(const FixedStart&, const FixedStart&) = default;
};
struct FixedState {
  std::size_t index;
  friend bool operator==(const FixedState&, const FixedState&) = default;
};

/// iid draws from a member of a natural exponential family.
struct IidExpFam {
  expfam::Family family;
  double mean;

  static IidExpFam make(const expfam::Family& family, double mean);
};

/// iid N(mean, variance) with a variance free of any policy assumption.
struct IidGaussian {
  double mean;
  double variance;

  static IidGaussian make(double mean, double variance);
};

/// X(t) = alpha + beta X(t−1) + W(t), W ~ N(0, innovation_variance).
/// The start value is the state *before* the first reward.
struct Ar1Gaussian {
  double alpha;
  double beta;
  double innovation_variance;
  std::variant<StationaryStart, FixedStart> init;

  static Ar1Gaussian make(double alpha, double beta, double innovation_variance,
                          std::variant<StationaryStart, FixedStart> init =
                              StationaryStart{});

  /// AR(1) whose stationary law is N(long_run_mean, marginal_variance).
  static Ar1Gaussian marginal_matched(double long_run_mean, double beta,
                                      double marginal_variance);

  double stationary_mean() const noexcept { return alpha / (1.0 - beta); }
  double stationary_variance() const noexcept {
    return innovation_variance / (1.0 - beta * beta);
  }
};

/// Finite-state chain; the reward is the value of the state entered.
/// The start state is the state *before* the first reward.
struct FiniteMarkov {
  std::vector<double> states;
  Eigen::MatrixXd transition;
  std::variant<StationaryStart, FixedState> init;
  // Derived at construction.
  Eigen::MatrixXd cumulative;
  Eigen::VectorXd stationary;

  static FiniteMarkov make(std::vector<double> states, Eigen::MatrixXd transition,
                           std::variant<StationaryStart, FixedState> init =
                               StationaryStart{});
};

using RewardProcess = std::variant<IidExpFam, IidGaussian, Ar1Gaussian, FiniteMarkov>;

/// Checks square, non-negative, rows summing to 1 within 1e-12 and
/// irreducibility (every state reaches every other state).
void validate_transition(const Eigen::MatrixXd& transition);
bool is_irreducible(const Eigen::MatrixXd& transition);

/// π with πQ = π and Σπ = 1.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

double long_run_mean(const RewardProcess& process);

/// Per-arm generator state. Advances exactly once per `next_reward` call.
class ArmState {
 public:
  /// Draws the initial condition (if stationary) from `stream`.
  ArmState(const RewardProcess& process, rng::Stream& stream);

  double next_reward(rng::Stream& stream);

  std::uint64_t draws() const noexcept { return draws_; }
  /// Last AR(1) value or current chain-state index.
  double last_value() const noexcept { return value_; }
  std::size_t chain_state() const noexcept { return chain_state_; }

 private:
  std::size_t sample_row(std::size_t row, rng::Stream& stream) const;

  const RewardProcess* process_;
  std::size_t kind_;
  double value_ = 0.0;
  std::size_t chain_state_ = 0;
  std::uint64_t draws_ = 0;
  double location_ = 0.0;
  double scale_ = 1.0;
  boost::random::normal_distribution<double> normal_;
  boost::random::poisson_distribution<int, double> poisson_;
  boost::random::exponential_distribution<double> exponential_;
};

}  // namespace tailreg::envproc

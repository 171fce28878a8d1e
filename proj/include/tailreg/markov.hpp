#pragma once

#include <functional>
#include <span>

#include <Eigen/Dense>

#include "tailreg/expfam.hpp"

namespace tailreg::markov {

/// Perron-Frobenius eigenpair of M_θ(x, y) = e^{θ·y} Q(x, y).
struct PfEigen {
  double phi;
  Eigen::VectorXd v;  // strictly positive, v(0) = 1
};

/// Chain tilted so that its stationary mean hits a prescribed value.
struct TiltedChain {
  double theta;
  double phi;
  Eigen::VectorXd v;
  Eigen::MatrixXd transition;
  double mean;
};

/// Largest |θ| the tilt search will try before declaring a mean unreachable.
inline constexpr double kThetaCap = 50.0;

/// Power iteration on a shifted M_θ (the shift makes periodic chains
/// converge). Throws NumericError after 1e5 iterations.
PfEigen pf_eig(const Eigen::MatrixXd& transition, std::span<const double> states,
               double theta);

/// Q^θ(x, y) = v(y)/v(x) · e^{θy} Q(x, y) / φ(θ), rows renormalized.
Eigen::MatrixXd tilt_transition(const Eigen::MatrixXd& transition,
                                std::span<const double> states, double theta);

/// Stationary mean Σ π(x)·x of a chain.
double stationary_mean(const Eigen::MatrixXd& transition,
                       std::span<const double> states);

/// Bisection on θ for the tilted chain whose stationary mean is z.
TiltedChain tilt_to_mean(const Eigen::MatrixXd& transition,
                         std::span<const double> states, double z);

/// Relative entropy rate Σ_x π′(x) Σ_y Q′(x,y) ln(Q′(x,y)/Q(x,y)).
expfam::KlValue markov_kl(const Eigen::MatrixXd& tilted,
                          const Eigen::MatrixXd& base,
                          std::span<const double> states);

using MeanDivergence = std::function<double(double, double)>;

/// −inf_{z < μ(Q2)} D(Q1^z, Q1) / D^π(z, μ(Q2)).
double markov_tail_exponent(const Eigen::MatrixXd& optimal,
                            const Eigen::MatrixXd& suboptimal,
                            std::span<const double> states,
                            const MeanDivergence& policy_divergence);

}  // namespace tailreg::markov

#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tailreg/cli/presets.hpp"
#include "tailreg/harness.hpp"

namespace tailreg::cli {

inline constexpr std::string_view kTailHeader =
    "experiment,config_hash,curve_param,T,x,hits,reps,p_hat,ci_lo,ci_hi,"
    "exponent,exp_ci_lo,exp_ci_hi,censored,analytic_exponent";
inline constexpr std::string_view kWllnHeader =
    "experiment,config_hash,curve_param,T,reps,median_regret_over_log_T,target";
inline constexpr std::string_view kMomentsHeader =
    "experiment,config_hash,curve_param,T,reps,order,moment,ci_lo,ci_hi";
inline constexpr std::string_view kConditionalHeader =
    "experiment,config_hash,curve_param,T,x,reps,conditioned,p_hat,censored,"
    "mean_optimal,mean_suboptimal,uncond_mean_optimal,uncond_mean_suboptimal,"
    "frac_optimal_under,frac_suboptimal_close";

/// Six significant digits.
std::string format_exponent(double value);

void write_tail_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                    const std::vector<harness::TailEstimate>& rows);
void write_wlln_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                    const std::vector<double>& medians);
void write_moments_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                       const std::vector<harness::MomentEstimate>& rows);
void write_conditional_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                           double x, const harness::ConditionalReport& report);

}  // namespace tailreg::cli

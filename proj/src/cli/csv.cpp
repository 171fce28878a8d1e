#include "tailreg/cli/csv.hpp"

#include <cstdio>

namespace tailreg::cli {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.10g", v); }
std::string opt_exponent(const std::optional<double>& v) {
  return v ? format_exponent(*v) : std::string();
}

// Curve labels are free text; quote them when they would break the row.
std::string field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void prefix(std::ostream& out, const Curve& curve, std::string_view hash) {
  out << field(curve.config.experiment) << ',' << hash << ',' << field(curve.config.curve_param)
      << ',';
}

}  // namespace

std::string format_exponent(double value) { return fmt("%.6g", value); }

void write_tail_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                    const std::vector<harness::TailEstimate>& rows) {
  out << kTailHeader << '\n';
  const auto& analytic = curve.config.analytic_exponent;
  for (const auto& e : rows) {
    prefix(out, curve, hash);
    out << e.horizon << ',' << num(e.threshold) << ',' << e.hits << ',' << e.reps << ','
        << num(e.p_hat) << ',' << num(e.ci_lo) << ',' << num(e.ci_hi) << ','
        << opt_exponent(e.exponent) << ',' << opt_exponent(e.exponent_ci_lo) << ','
        << opt_exponent(e.exponent_ci_hi) << ',' << (e.censored ? 1 : 0) << ','
        << opt_exponent(analytic) << '\n';
  }
}

void write_wlln_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                    const std::vector<double>& medians) {
  out << kWllnHeader << '\n';
  const auto checkpoints = curve.config.effective_checkpoints();
  for (std::size_t c = 0; c < medians.size(); ++c) {
    prefix(out, curve, hash);
    out << checkpoints[c] << ',' << curve.config.replications << ',' << num(medians[c]) << ','
        << (curve.target ? num(*curve.target) : std::string()) << '\n';
  }
}

void write_moments_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                       const std::vector<harness::MomentEstimate>& rows) {
  out << kMomentsHeader << '\n';
  for (const auto& m : rows) {
    prefix(out, curve, hash);
    out << m.horizon << ',' << curve.config.replications << ',' << num(curve.moment_order) << ','
        << num(m.mean) << ',' << num(m.ci_lo) << ',' << num(m.ci_hi) << '\n';
  }
}

void write_conditional_csv(std::ostream& out, const Curve& curve, std::string_view hash,
                           double x, const harness::ConditionalReport& r) {
  out << kConditionalHeader << '\n';
  prefix(out, curve, hash);
  out << curve.config.horizon << ',' << num(x) << ',' << r.reps << ',' << r.conditioned << ','
      << num(r.p_hat) << ',' << (r.censored ? 1 : 0) << ',';
  if (r.censored) {
    out << ",,";
  } else {
    out << num(r.mean_optimal) << ',' << num(r.mean_suboptimal) << ',';
  }
  out << num(r.unconditional_mean_optimal) << ',' << num(r.unconditional_mean_suboptimal) << ',';
  if (r.censored) {
    out << ",\n";
  } else {
    out << num(r.fraction_optimal_under) << ',' << num(r.fraction_suboptimal_close) << '\n';
  }
}

}  // namespace tailreg::cli

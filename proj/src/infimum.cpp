#include "tailreg/infimum.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "tailreg/errors.hpp"

namespace tailreg::numeric {
namespace {

double safe_eval(const std::function<double(double)>& f, double z) {
  try {
    const double v = f(z);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

InfimumResult infimum_below(const std::function<double(double)>& f, double upper,
                            double lower, const InfimumOptions& options) {
  const int n = options.grid_points;
  const bool bounded = std::isfinite(lower);
  double d_min;
  double d_max;
  if (bounded) {
    const double span = upper - lower;
    if (!(span > 0.0)) throw UsageError("infimum: empty search interval");
    d_min = span * options.min_offset;
    d_max = span * (1.0 - options.boundary_gap);
  } else {
    d_min = options.min_offset;
    d_max = options.max_offset_unbounded;
  }

  // z[0] is nearest `upper`, z[n-1] nearest the lower end.
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<double> v(static_cast<std::size_t>(n));
  const double log_ratio = std::log(d_max / d_min);
  int best = -1;
  for (int i = 0; i < n; ++i) {
    const double d = d_min * std::exp(log_ratio * i / (n - 1));
    z[i] = upper - d;
    v[i] = safe_eval(f, z[i]);
    if (!std::isnan(v[i]) && (best < 0 || v[i] < v[best])) best = i;
  }
  if (best < 0) {
    throw NumericError("infimum: objective is non-finite on the whole grid",
                       std::numeric_limits<double>::quiet_NaN());
  }
  if (best == n - 1) return {v[best], z[best], true};

  // Golden-section on the bracket formed by the neighbouring grid points.
  double a = best + 1 < n ? z[best + 1] : z[best];
  double b = best > 0 ? z[best - 1] : upper - 0.5 * d_min;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = safe_eval(f, c);
  double fd = safe_eval(f, d);
  double best_value = v[best];
  double best_z = z[best];
  for (int iter = 0; iter < 200 && (b - a) > options.tolerance * (1.0 + std::abs(b));
       ++iter) {
    if (!std::isnan(fc) && (std::isnan(fd) || fc < fd)) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = safe_eval(f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = safe_eval(f, d);
    }
    if (!std::isnan(fc) && fc < best_value) {
      best_value = fc;
      best_z = c;
    }
    if (!std::isnan(fd) && fd < best_value) {
      best_value = fd;
      best_z = d;
    }
  }
  return {best_value, best_z, false};
}

}  // namespace tailreg::numeric

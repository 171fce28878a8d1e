#pragma once

#include <functional>

namespace tailreg::numeric {

struct InfimumOptions {
  int grid_points = 200;
  /// Smallest offset below `upper`, relative to the span (or absolute when
  /// the lower end is infinite).
  double min_offset = 1e-6;
  /// Largest offset for an infinite lower end.
  double max_offset_unbounded = 1e8;
  /// Closest approach to a finite lower end, relative to the span.
  double boundary_gap = 1e-9;
  double tolerance = 1e-8;
};

struct InfimumResult {
  double value;
  double argmin;
  /// The minimizing grid point was the one nearest the lower end, so `value`
  /// approximates the limit at the domain boundary.
  bool at_boundary;
};

/// inf_{lower < z < upper} f(z) over a geometric grid of offsets below `upper`
/// followed by golden-section refinement around the grid minimizer. Grid points
/// where f throws DomainError or is non-finite are skipped; if all are, throws
/// NumericError.
InfimumResult infimum_below(const std::function<double(double)>& f, double upper,
                            double lower, const InfimumOptions& options = {});

}  // namespace tailreg::numeric

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailreg/exponents.hpp"
#include "tailreg/harness.hpp"

namespace tailreg::cli {

/// What a curve's replications are reduced to.
enum class Analysis { Tail, Wlln, Moments, Conditional };

std::string_view to_string(Analysis analysis) noexcept;
Analysis parse_analysis(std::string_view text);

/// One experiment of a preset or config file; written to its own CSV.
struct Curve {
  harness::ExperimentConfig config;
  Analysis analysis = Analysis::Tail;
  std::optional<exponents::ExponentReport> analytic;
  /// Moments: order p of E[N(T)^p].
  double moment_order = 1.5;
  /// Conditional: the event is N(T) ≥ fraction·T.
  double condition_fraction = 0.5;
  /// Wlln: the constant N(T)/ln T should approach.
  std::optional<double> target;
};

struct Preset {
  std::string id;
  std::string summary;
  std::vector<Curve> curves;
};

std::vector<std::string> preset_ids();

/// Throws UsageError for an unknown id.
Preset make_preset(std::string_view id);

/// Command-line overrides shared by `run` and `dump-preset`.
struct Overrides {
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> replications;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::vector<double>> x_grid;
};

/// A new horizon keeps the checkpoints below it and adds the horizon itself.
void apply_overrides(std::vector<Curve>& curves, const Overrides& overrides);

}  // namespace tailreg::cli

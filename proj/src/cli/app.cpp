#include "tailreg/cli/app.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tailreg/cli/config_io.hpp"
#include "tailreg/cli/csv.hpp"
#include "tailreg/cli/presets.hpp"
#include "tailreg/errors.hpp"

namespace tailreg::cli {
namespace {

namespace fs = std::filesystem;

std::string slug(std::string_view text) {
  std::string out;
  for (char ch : text) {
    const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-';
    out += keep ? ch : '-';
  }
  return out.empty() ? "curve" : out;
}

fs::path csv_path(const fs::path& dir, const Curve& curve, std::size_t index) {
  std::string name = slug(curve.config.experiment);
  name += "_";
  name += curve.config.curve_param.empty() ? std::to_string(index) : slug(curve.config.curve_param);
  return dir / (name + ".csv");
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw UsageError("failed writing '" + path.string() + "'");
}

std::string analytic_text(const Curve& curve) {
  if (!curve.analytic) return "";
  return " (analytic " + format_exponent(curve.analytic->exponent) + ", " +
         std::string(exponents::to_string(curve.analytic->kind)) + ")";
}

// The point of a tail curve closest to the asymptote that still has hits.
std::string tail_summary(const std::vector<harness::TailEstimate>& rows) {
  const harness::TailEstimate* pick = nullptr;
  for (const auto& e : rows) {
    if (e.exponent) pick = &e;
  }
  if (!pick) {
    const auto& last = rows.back();
    return "censored at T=" + std::to_string(last.horizon) + " (exponent <= " +
           format_exponent(last.censored_bound.value_or(0.0)) + ")";
  }
  return "exponent " + format_exponent(*pick->exponent) + " at T=" + std::to_string(pick->horizon) +
         ", x=" + format_exponent(pick->threshold);
}

void run_curve(const Curve& curve, const fs::path& path) {
  const std::string hash = config_hash(curve);
  std::ofstream out = open_output(path);
  std::string summary;
  switch (curve.analysis) {
    case Analysis::Tail: {
      const auto rows = harness::estimate_tail(curve.config);
      write_tail_csv(out, curve, hash, rows);
      summary = tail_summary(rows);
      break;
    }
    case Analysis::Wlln: {
      const auto medians = harness::log_normalized_median(curve.config);
      write_wlln_csv(out, curve, hash, medians);
      summary = "median N/ln T " + format_exponent(medians.back()) + " at T=" +
                std::to_string(curve.config.effective_checkpoints().back());
      if (curve.target) summary += " (target " + format_exponent(*curve.target) + ")";
      break;
    }
    case Analysis::Moments: {
      const auto rows = harness::moment_estimate(curve.config, curve.moment_order);
      write_moments_csv(out, curve, hash, rows);
      summary = "E[N^" + format_exponent(curve.moment_order) + "] " +
                format_exponent(rows.back().mean) + " at T=" + std::to_string(rows.back().horizon);
      break;
    }
    case Analysis::Conditional: {
      const double x = std::max(1.0, curve.condition_fraction * static_cast<double>(curve.config.horizon));
      const auto report = harness::conditional_diagnostics(curve.config, x);
      write_conditional_csv(out, curve, hash, x, report);
      summary = std::to_string(report.conditioned) + " of " + std::to_string(report.reps) +
                " reps conditioned";
      if (!report.censored) {
        summary += ", mean suboptimal " + format_exponent(report.mean_suboptimal) +
                   ", mean optimal " + format_exponent(report.mean_optimal);
      }
      break;
    }
  }
  close_output(out, path);
  std::cout << curve.config.experiment << " " << curve.config.curve_param << ": " << summary
            << analytic_text(curve) << " -> " << path.string() << "\n";
}

struct RunArgs {
  std::string positional;
  std::string preset;
  std::string config;
  std::string out = "results";
  Overrides overrides;
  std::int64_t horizon = 0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  std::vector<double> x_grid;
};

void add_overrides(CLI::App& cmd, RunArgs& a) {
  cmd.add_option("--T", a.horizon, "Horizon T (checkpoints above it are dropped)");
  cmd.add_option("--reps", a.reps, "Replications R");
  cmd.add_option("--seed", a.seed, "Base seed");
  cmd.add_option("--workers", a.workers, "OpenMP worker threads");
  cmd.add_option("--x-grid", a.x_grid, "Threshold fractions of T, comma separated")->delimiter(',');
}

Overrides collect(const CLI::App& cmd, const RunArgs& a) {
  Overrides o;
  if (cmd.count("--T")) o.horizon = a.horizon;
  if (cmd.count("--reps")) o.replications = a.reps;
  if (cmd.count("--seed")) o.seed = a.seed;
  if (cmd.count("--workers")) o.workers = a.workers;
  if (cmd.count("--x-grid")) o.x_grid = a.x_grid;
  return o;
}

std::vector<Curve> load_curves(const RunArgs& a) {
  const int sources = (a.positional.empty() ? 0 : 1) + (a.preset.empty() ? 0 : 1) +
                      (a.config.empty() ? 0 : 1);
  if (sources != 1) throw UsageError("give exactly one of PRESET, --preset or --config");
  if (!a.config.empty()) return load_config(a.config);
  return make_preset(a.positional.empty() ? a.preset : a.positional).curves;
}

void run_command(const CLI::App& cmd, const RunArgs& a) {
  auto curves = load_curves(a);
  apply_overrides(curves, collect(cmd, a));
  const fs::path dir = a.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("cannot create output directory '" + dir.string() + "'");
  }
  for (std::size_t i = 0; i < curves.size(); ++i) run_curve(curves[i], csv_path(dir, curves[i], i));
}

void dump_command(const CLI::App& cmd, const RunArgs& a) {
  auto curves = make_preset(a.positional).curves;
  apply_overrides(curves, collect(cmd, a));
  const std::string text = to_toml(curves);
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out = open_output(a.out);
  out << text;
  close_output(out, a.out);
}

struct ExponentArgs {
  std::vector<double> bernoulli, poisson, exponential, gaussian, misspec, ar1;
  double matched = 0.0;
  double variance = 1.0;
  double b = 0.0;
};

exponents::ExponentReport exponent_query(const CLI::App& cmd, const ExponentArgs& a) {
  int chosen = 0;
  for (const char* flag : {"--bernoulli", "--poisson", "--exponential", "--gaussian",
                           "--gaussian-misspec", "--ar1", "--ar1-matched"}) {
    chosen += cmd.count(flag) ? 1 : 0;
  }
  if (chosen != 1) throw UsageError("give exactly one exponent query");
  auto pair = [](const std::vector<double>& v) { return std::pair{v.at(0), v.at(1)}; };
  if (cmd.count("--bernoulli")) {
    const auto [m1, m2] = pair(a.bernoulli);
    return exponents::wellspec_expfam_exponent(expfam::Family::bernoulli(), m1, m2, a.b);
  }
  if (cmd.count("--poisson")) {
    const auto [m1, m2] = pair(a.poisson);
    return exponents::wellspec_expfam_exponent(expfam::Family::poisson(), m1, m2, a.b);
  }
  if (cmd.count("--exponential")) {
    const auto [m1, m2] = pair(a.exponential);
    return exponents::wellspec_expfam_exponent(expfam::Family::exponential(), m1, m2, a.b);
  }
  if (cmd.count("--gaussian")) {
    const auto [m1, m2] = pair(a.gaussian);
    return exponents::wellspec_expfam_exponent(expfam::Family::gaussian(a.variance), m1, m2, a.b);
  }
  if (cmd.count("--gaussian-misspec")) {
    const auto [assumed, actual] = pair(a.misspec);
    return exponents::gaussian_misspec_exponent(assumed, actual, a.b);
  }
  if (cmd.count("--ar1")) return exponents::ar1_exponent_bound(a.ar1[0], a.ar1[1], a.ar1[2], a.b);
  return exponents::ar1_marginal_matched(a.matched, a.b);
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Regret-tail experiments for KL-UCB bandits", "tailreg"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a preset or config file and write one CSV per curve");
  run->add_option("preset_id", run_args.positional, "Preset id");
  run->add_option("--preset", run_args.preset, "Preset id");
  run->add_option("--config", run_args.config, "TOML config file");
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  add_overrides(*run, run_args);

  RunArgs dump_args;
  dump_args.out = "-";
  auto* dump = app.add_subcommand("dump-preset", "Write a preset as a TOML config");
  dump->add_option("preset_id", dump_args.positional, "Preset id")->required();
  dump->add_option("--out", dump_args.out, "Output file ('-' for stdout)");
  add_overrides(*dump, dump_args);

  auto* list = app.add_subcommand("list", "List presets");

  ExponentArgs ex;
  auto* exponent = app.add_subcommand("exponent", "Print an analytic tail exponent");
  exponent->add_option("--bernoulli", ex.bernoulli, "Bernoulli KL-UCB: MU1 MU2")->expected(2);
  exponent->add_option("--poisson", ex.poisson, "Poisson KL-UCB: MU1 MU2")->expected(2);
  exponent->add_option("--exponential", ex.exponential, "Exponential KL-UCB: MU1 MU2")->expected(2);
  exponent->add_option("--gaussian", ex.gaussian, "Gaussian KL-UCB: MU1 MU2")->expected(2);
  exponent->add_option("--variance", ex.variance, "Variance for --gaussian");
  exponent->add_option("--gaussian-misspec", ex.misspec, "Assumed and true variance")->expected(2);
  exponent->add_option("--ar1", ex.ar1, "Assumed variance, innovation variance, beta")->expected(3);
  exponent->add_option("--ar1-matched", ex.matched, "Common AR coefficient beta0");
  exponent->add_option("--b", ex.b, "Robustness scale b");

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      run_command(*run, run_args);
    } else if (dump->parsed()) {
      dump_command(*dump, dump_args);
    } else if (list->parsed()) {
      for (const auto& id : preset_ids()) {
        std::cout << id << "\t" << make_preset(id).summary << "\n";
      }
    } else if (exponent->parsed()) {
      const auto report = exponent_query(*exponent, ex);
      std::cout << format_exponent(report.exponent) << " " << exponents::to_string(report.kind)
                << " " << report.formula << "\n";
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "tailreg: numeric failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNumeric;
  } catch (const UsageError& e) {
    std::cerr << "tailreg: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "tailreg: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace tailreg::cli

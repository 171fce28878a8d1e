#include "tailreg/cli/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "tailreg/errors.hpp"

namespace tailreg::cli {
namespace {

// ---------------------------------------------------------------- writing

std::string real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string toml_string(std::string_view text) {
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

template <class T, class Fmt>
std::string array(const std::vector<T>& values, Fmt fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out + "]";
}

std::string integer(std::int64_t v) { return std::to_string(v); }

std::string seed_text(std::uint64_t seed) {
  if (seed <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    return std::to_string(seed);
  }
  return toml_string(std::to_string(seed));
}

void write_family(std::ostream& out, const expfam::Family& f) {
  out << "family = " << toml_string(f.name()) << "\n";
  if (f.kind() == expfam::Kind::GaussianKnownVar) out << "variance = " << real(f.variance()) << "\n";
}

void write_arm(std::ostream& out, const envproc::RewardProcess& arm) {
  out << "\n[[experiment.arm]]\n";
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, envproc::IidExpFam>) {
          out << "type = \"iid-expfam\"\n";
          write_family(out, p.family);
          out << "mean = " << real(p.mean) << "\n";
        } else if constexpr (std::is_same_v<P, envproc::IidGaussian>) {
          out << "type = \"iid-gaussian\"\nmean = " << real(p.mean)
              << "\nvariance = " << real(p.variance) << "\n";
        } else if constexpr (std::is_same_v<P, envproc::Ar1Gaussian>) {
          out << "type = \"ar1\"\nalpha = " << real(p.alpha) << "\nbeta = " << real(p.beta)
              << "\ninnovation_variance = " << real(p.innovation_variance) << "\n";
          if (const auto* fixed = std::get_if<envproc::FixedStart>(&p.init)) {
            out << "start = \"fixed\"\nx0 = " << real(fixed->x0) << "\n";
          } else {
            out << "start = \"stationary\"\n";
          }
        } else {
          out << "type = \"markov\"\nstates = " << array(p.states, real) << "\ntransition = [";
          for (Eigen::Index i = 0; i < p.transition.rows(); ++i) {
            std::vector<double> row(p.transition.row(i).begin(), p.transition.row(i).end());
            out << (i ? ", " : "") << array(row, real);
          }
          out << "]\n";
          if (const auto* fixed = std::get_if<envproc::FixedState>(&p.init)) {
            out << "start = \"fixed\"\nstate = " << fixed->index << "\n";
          } else {
            out << "start = \"stationary\"\n";
          }
        }
      },
      arm);
}

void write_policy(std::ostream& out, const harness::PolicySpec& spec) {
  out << "\n[experiment.policy]\n";
  if (const auto* ts = std::get_if<harness::ThompsonPolicy>(&spec)) {
    out << "type = \"thompson\"\nvariance = " << real(ts->variance) << "\n";
    return;
  }
  const auto& div = std::get<harness::KlUcbPolicy>(spec).divergence;
  if (!div.family()) throw UsageError("custom divergences cannot be written to a config file");
  out << "type = \"kl-ucb\"\n";
  write_family(out, *div.family());
  out << "b = " << real(div.b()) << "\n";
}

void write_curve(std::ostream& out, const Curve& curve, bool with_workers) {
  const auto& c = curve.config;
  out << "[[experiment]]\n"
      << "name = " << toml_string(c.experiment) << "\n"
      << "curve_param = " << toml_string(c.curve_param) << "\n"
      << "analysis = " << toml_string(to_string(curve.analysis)) << "\n"
      << "horizon = " << c.horizon << "\n"
      << "replications = " << c.replications << "\n"
      << "checkpoints = " << array(c.checkpoints, integer) << "\n"
      << "thresholds = " << array(c.thresholds.values, real) << "\n"
      << "thresholds_fractional = " << (c.thresholds.fractional ? "true" : "false") << "\n"
      << "event = " << (c.event == harness::EventKind::AtLeast ? "\"at-least\"" : "\"greater\"") << "\n"
      << "scale = "
      << (c.scale == harness::ExponentScale::LogThreshold ? "\"log-threshold\"" : "\"log-horizon\"")
      << "\n"
      << "seed = " << seed_text(c.seed) << "\n";
  if (with_workers) out << "workers = " << c.workers << "\n";
  if (curve.analytic) {
    out << "analytic_exponent = " << real(curve.analytic->exponent) << "\n"
        << "analytic_kind = " << toml_string(exponents::to_string(curve.analytic->kind)) << "\n"
        << "analytic_formula = " << toml_string(curve.analytic->formula) << "\n";
  } else if (c.analytic_exponent) {
    out << "analytic_exponent = " << real(*c.analytic_exponent) << "\n";
  }
  if (curve.analysis == Analysis::Moments) out << "moment_order = " << real(curve.moment_order) << "\n";
  if (curve.analysis == Analysis::Conditional) {
    out << "condition_fraction = " << real(curve.condition_fraction) << "\n";
  }
  if (curve.target) out << "target = " << real(*curve.target) << "\n";
  write_policy(out, c.policy);
  for (const auto& arm : c.arms) write_arm(out, arm);
}

// ---------------------------------------------------------------- reading

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw UsageError(where + ": " + what);
}

// Typed access to one table; `finish` rejects keys that were never read.
class Reader {
 public:
  Reader(const toml::table& table, std::string where) : table_(table), where_(std::move(where)) {}

  const std::string& where() const { return where_; }
  bool has(std::string_view key) const { return table_.contains(key); }

  const toml::node& node(std::string_view key) {
    seen_.insert(std::string(key));
    const toml::node* n = table_.get(key);
    if (!n) fail(where_, "missing key '" + std::string(key) + "'");
    return *n;
  }

  double real(std::string_view key) { return as_real(node(key), key); }
  std::optional<double> opt_real(std::string_view key) {
    if (!has(key)) return std::nullopt;
    return real(key);
  }

  std::int64_t integer(std::string_view key) {
    const auto v = node(key).value<std::int64_t>();
    if (!node(key).is_integer() || !v) fail(where_, "'" + std::string(key) + "' must be an integer");
    return *v;
  }

  std::string text(std::string_view key) {
    const auto& n = node(key);
    if (!n.is_string()) fail(where_, "'" + std::string(key) + "' must be a string");
    return *n.value<std::string>();
  }
  std::string opt_text(std::string_view key, std::string fallback) {
    return has(key) ? text(key) : fallback;
  }

  bool boolean(std::string_view key) {
    const auto& n = node(key);
    if (!n.is_boolean()) fail(where_, "'" + std::string(key) + "' must be true or false");
    return *n.value<bool>();
  }

  const toml::array& arr(std::string_view key) {
    const auto* a = node(key).as_array();
    if (!a) fail(where_, "'" + std::string(key) + "' must be an array");
    return *a;
  }

  std::vector<double> reals(std::string_view key) {
    std::vector<double> out;
    for (const auto& n : arr(key)) out.push_back(as_real(n, key));
    return out;
  }

  std::vector<std::int64_t> integers(std::string_view key) {
    std::vector<std::int64_t> out;
    for (const auto& n : arr(key)) {
      if (!n.is_integer()) fail(where_, "'" + std::string(key) + "' must hold integers");
      out.push_back(*n.value<std::int64_t>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : table_) {
      if (!seen_.count(std::string(key.str()))) {
        fail(where_, "unknown key '" + std::string(key.str()) + "'");
      }
    }
  }

  double as_real(const toml::node& n, std::string_view key) const {
    if (n.is_floating_point()) return *n.value<double>();
    if (n.is_integer()) return static_cast<double>(*n.value<std::int64_t>());
    fail(where_, "'" + std::string(key) + "' must be a number");
  }

 private:
  const toml::table& table_;
  std::string where_;
  std::set<std::string> seen_;
};

const toml::table& as_table(const toml::node& n, const std::string& where) {
  const auto* t = n.as_table();
  if (!t) fail(where, "expected a table");
  return *t;
}

expfam::Family read_family(Reader& r) {
  const std::string name = r.text("family");
  if (name == "gaussian") return expfam::Family::gaussian(r.real("variance"));
  if (name == "bernoulli") return expfam::Family::bernoulli();
  if (name == "poisson") return expfam::Family::poisson();
  if (name == "exponential") return expfam::Family::exponential();
  fail(r.where(), "unknown family '" + name + "'");
}

envproc::RewardProcess read_arm(Reader& r) {
  const std::string type = r.text("type");
  if (type == "iid-expfam") {
    const auto family = read_family(r);
    return envproc::IidExpFam::make(family, r.real("mean"));
  }
  if (type == "iid-gaussian") return envproc::IidGaussian::make(r.real("mean"), r.real("variance"));
  if (type == "ar1") {
    const double alpha = r.real("alpha");
    const double beta = r.real("beta");
    const double innovation = r.real("innovation_variance");
    const std::string start = r.opt_text("start", "stationary");
    if (start == "stationary") return envproc::Ar1Gaussian::make(alpha, beta, innovation);
    if (start == "fixed") {
      return envproc::Ar1Gaussian::make(alpha, beta, innovation, envproc::FixedStart{r.real("x0")});
    }
    fail(r.where(), "start must be \"stationary\" or \"fixed\"");
  }
  if (type == "markov") {
    auto states = r.reals("states");
    const auto& rows = r.arr("transition");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd q(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto* row = rows[static_cast<std::size_t>(i)].as_array();
      if (!row || static_cast<Eigen::Index>(row->size()) != n) {
        fail(r.where(), "transition must be a square array of arrays");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        q(i, j) = r.as_real((*row)[static_cast<std::size_t>(j)], "transition");
      }
    }
    const std::string start = r.opt_text("start", "stationary");
    if (start == "stationary") return envproc::FiniteMarkov::make(std::move(states), q);
    if (start == "fixed") {
      const auto index = r.integer("state");
      if (index < 0) fail(r.where(), "state must be non-negative");
      return envproc::FiniteMarkov::make(std::move(states), q,
                                         envproc::FixedState{static_cast<std::size_t>(index)});
    }
    fail(r.where(), "start must be \"stationary\" or \"fixed\"");
  }
  fail(r.where(), "unknown arm type '" + type + "'");
}

harness::PolicySpec read_policy(Reader& r) {
  const std::string type = r.text("type");
  if (type == "thompson") return harness::ThompsonPolicy{r.real("variance")};
  if (type == "kl-ucb") {
    const auto family = read_family(r);
    const double b = r.has("b") ? r.real("b") : 0.0;
    return harness::KlUcbPolicy{policy::DivergenceSpec::family_kl(family, b)};
  }
  fail(r.where(), "unknown policy type '" + type + "'");
}

std::uint64_t read_seed(Reader& r) {
  const auto& n = r.node("seed");
  if (n.is_integer()) {
    const auto v = *n.value<std::int64_t>();
    if (v < 0) fail(r.where(), "seed must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  if (n.is_string()) {
    const std::string s = *n.value<std::string>();
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  fail(r.where(), "seed must be a non-negative integer");
}

exponents::BoundKind read_kind(Reader& r) {
  const std::string kind = r.opt_text("analytic_kind", "exact");
  if (kind == "exact") return exponents::BoundKind::Exact;
  if (kind == "lower-bound") return exponents::BoundKind::LowerBound;
  fail(r.where(), "analytic_kind must be \"exact\" or \"lower-bound\"");
}

Curve read_curve(const toml::table& table, const std::string& where) {
  Reader r(table, where);
  Curve curve;
  auto& c = curve.config;
  c.experiment = r.text("name");
  c.curve_param = r.opt_text("curve_param", "");
  curve.analysis = r.has("analysis") ? parse_analysis(r.text("analysis")) : Analysis::Tail;
  c.horizon = r.integer("horizon");
  c.replications = r.integer("replications");
  if (r.has("checkpoints")) c.checkpoints = r.integers("checkpoints");
  if (r.has("thresholds")) c.thresholds.values = r.reals("thresholds");
  if (r.has("thresholds_fractional")) c.thresholds.fractional = r.boolean("thresholds_fractional");
  const std::string event = r.opt_text("event", "at-least");
  if (event == "at-least") {
    c.event = harness::EventKind::AtLeast;
  } else if (event == "greater") {
    c.event = harness::EventKind::Greater;
  } else {
    fail(where, "event must be \"at-least\" or \"greater\"");
  }
  const std::string scale = r.opt_text("scale", "log-threshold");
  if (scale == "log-threshold") {
    c.scale = harness::ExponentScale::LogThreshold;
  } else if (scale == "log-horizon") {
    c.scale = harness::ExponentScale::LogHorizon;
  } else {
    fail(where, "scale must be \"log-threshold\" or \"log-horizon\"");
  }
  c.seed = r.has("seed") ? read_seed(r) : 1;
  if (r.has("workers")) c.workers = static_cast<int>(r.integer("workers"));
  if (r.has("analytic_exponent")) {
    const double e = r.real("analytic_exponent");
    const auto kind = read_kind(r);
    curve.analytic = exponents::ExponentReport{e, kind, r.opt_text("analytic_formula", "")};
    c.analytic_exponent = e;
  }
  if (r.has("moment_order")) curve.moment_order = r.real("moment_order");
  if (r.has("condition_fraction")) curve.condition_fraction = r.real("condition_fraction");
  curve.target = r.opt_real("target");

  {
    Reader p(as_table(r.node("policy"), where + ".policy"), where + ".policy");
    c.policy = read_policy(p);
    p.finish();
  }
  const auto& arms = r.arr("arm");
  for (std::size_t k = 0; k < arms.size(); ++k) {
    const std::string arm_where = where + ".arm[" + std::to_string(k) + "]";
    Reader a(as_table(arms[k], arm_where), arm_where);
    c.arms.push_back(read_arm(a));
    a.finish();
  }
  r.finish();
  if (curve.analysis == Analysis::Moments && !(curve.moment_order >= 1.0)) {
    fail(where, "moment_order must be >= 1");
  }
  if (curve.analysis == Analysis::Conditional &&
      !(curve.condition_fraction > 0.0 && curve.condition_fraction <= 1.0)) {
    fail(where, "condition_fraction must lie in (0, 1]");
  }
  c.validate();
  return curve;
}

}  // namespace

std::string to_toml(const std::vector<Curve>& curves) {
  std::ostringstream out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (i) out << "\n";
    write_curve(out, curves[i], true);
  }
  return out.str();
}

std::vector<Curve> parse_toml(std::string_view text, std::string_view source) {
  toml::table doc;
  try {
    doc = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw UsageError(msg.str());
  }
  for (const auto& [key, value] : doc) {
    if (key.str() != "experiment") {
      throw UsageError(std::string(source) + ": unknown key '" + std::string(key.str()) + "'");
    }
  }
  const auto* list = doc["experiment"].as_array();
  if (!list || list->empty()) {
    throw UsageError(std::string(source) + ": expected at least one [[experiment]] table");
  }
  std::vector<Curve> curves;
  try {
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string where = std::string(source) + ": experiment[" + std::to_string(i) + "]";
      curves.push_back(read_curve(as_table((*list)[i], where), where));
    }
  } catch (const DomainError& e) {
    throw UsageError(std::string(source) + ": " + e.what());
  }
  return curves;
}

std::vector<Curve> load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_toml(text.str(), path.string());
}

std::string config_hash(const Curve& curve) {
  std::ostringstream canonical;
  write_curve(canonical, curve, false);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tailreg::cli

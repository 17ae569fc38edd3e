#include "bpire/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <toml.hpp>

#include "bpire/errors.hpp"
#include "bpire/io.hpp"

namespace bpire {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::validate: return "validate";
    case ExperimentKind::estimate: return "estimate";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::walkseries: return "walkseries";
    case ExperimentKind::renewal: return "renewal";
    case ExperimentKind::identities: return "identities";
    case ExperimentKind::oracle: return "oracle";
  }
  return "";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::validate, ExperimentKind::estimate, ExperimentKind::sweep,
                 ExperimentKind::walkseries, ExperimentKind::renewal, ExperimentKind::identities,
                 ExperimentKind::oracle}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  return std::nullopt;
}

namespace {

std::string with_line(const std::string& key, std::size_t line, const std::string& message) {
  std::string out = "config error";
  if (!key.empty()) out += " at key '" + key + "'";
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  return out + ": " + message;
}

}  // namespace

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : std::runtime_error(with_line(key, line, message)), key_(std::move(key)), line_(line) {}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::size_t line_of(const toml::node& node) { return node.source().begin.line; }

// Typed access to one TOML table that remembers which keys were read, so
// that leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

  std::string path(std::string_view key) const { return prefix_ + std::string(key); }

  const toml::node* find(std::string_view key) {
    const toml::node* node = table_.get(key);
    if (node) used_.insert(std::string(key));
    return node;
  }

  bool has(std::string_view key) const { return table_.contains(key); }

  std::size_t line(std::string_view key) const {
    const toml::node* node = table_.get(key);
    return node ? line_of(*node) : line_of(table_);
  }

  [[noreturn]] void fail(std::string_view key, const std::string& message) const {
    throw ConfigError(path(key), line(key), message);
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    if (auto v = node->value<std::string>(); v && node->is_string()) return *v;
    fail(key, "expected a string");
  }

  std::optional<double> real(std::string_view key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    if (!node->is_number()) fail(key, "expected a number");
    const double v = *node->value<double>();
    if (!std::isfinite(v)) fail(key, "expected a finite number");
    return v;
  }

  std::optional<std::uint64_t> uint(std::string_view key, std::uint64_t min = 0) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    std::uint64_t v = 0;
    if (node->is_integer()) {
      const std::int64_t i = *node->value<std::int64_t>();
      if (i < 0) fail(key, "expected a nonnegative integer");
      v = static_cast<std::uint64_t>(i);
    } else if (node->is_floating_point()) {
      // Allows 1e7-style counts as long as they are exact integers.
      const double d = *node->value<double>();
      if (!(d >= 0.0 && d < 1.8e19 && std::floor(d) == d)) fail(key, "expected a nonnegative integer");
      v = static_cast<std::uint64_t>(d);
    } else if (node->is_string()) {
      // 64-bit values beyond the TOML integer range may be quoted.
      const std::string s = *node->value<std::string>();
      std::size_t pos = 0;
      try {
        if (s.empty() || s[0] == '-') throw std::invalid_argument("sign");
        v = std::stoull(s, &pos, 10);
      } catch (const std::exception&) {
        fail(key, "expected an unsigned integer");
      }
      if (pos != s.size()) fail(key, "expected an unsigned integer");
    } else {
      fail(key, "expected an integer");
    }
    if (v < min) fail(key, "must be >= " + std::to_string(min));
    return v;
  }

  std::optional<std::vector<double>> reals(std::string_view key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const toml::node& item : *arr) {
      if (!item.is_number()) fail(key, "expected an array of numbers");
      out.push_back(*item.value<double>());
      if (!std::isfinite(out.back())) fail(key, "expected finite numbers");
    }
    return out;
  }

  std::optional<std::vector<std::size_t>> sizes(std::string_view key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) fail(key, "expected an array of integers");
    std::vector<std::size_t> out;
    for (const toml::node& item : *arr) {
      if (!item.is_integer() || *item.value<std::int64_t>() < 1) {
        fail(key, "expected an array of positive integers");
      }
      out.push_back(static_cast<std::size_t>(*item.value<std::int64_t>()));
    }
    return out;
  }

  std::optional<Section> table(std::string_view key) {
    const toml::node* node = find(key);
    if (!node) return std::nullopt;
    const toml::table* t = node->as_table();
    if (!t) fail(key, "expected a table");
    return Section(*t, path(key) + ".");
  }

  // Rejects every key that was never read.
  void finish() const {
    for (auto&& [k, v] : table_) {
      if (!used_.count(std::string(k.str()))) {
        throw ConfigError(path(k.str()), k.source().begin.line ? k.source().begin.line : line_of(v),
                          "unknown key '" + std::string(k.str()) + "'");
      }
    }
  }

 private:
  const toml::table& table_;
  std::string prefix_;
  std::set<std::string> used_;
};

IncrementLaw parse_law(Section& s) {
  const auto family_name = s.string("family");
  if (!family_name) s.fail("family", "missing required key");
  const auto family = parse_law_family(*family_name);
  if (!family) s.fail("family", "unknown law family '" + *family_name + "'");
  if (*family == LawFamily::degenerate) {
    s.finish();
    return IncrementLaw::degenerate();
  }
  const std::string pname = [&] {
    switch (*family) {
      case LawFamily::gaussian: return "sigma";
      case LawFamily::uniform: return "half_width";
      case LawFamily::laplace: return "scale";
      case LawFamily::two_point_lattice: return "step";
      case LawFamily::degenerate: break;
    }
    return "";
  }();
  const auto value = s.real(pname);
  s.finish();  // unknown parameter names are reported before a missing one
  if (!value) s.fail(pname, "missing required parameter for family '" + *family_name + "'");
  try {
    switch (*family) {
      case LawFamily::gaussian: return IncrementLaw::gaussian(*value);
      case LawFamily::uniform: return IncrementLaw::uniform(*value);
      case LawFamily::laplace: return IncrementLaw::laplace(*value);
      case LawFamily::two_point_lattice: return IncrementLaw::two_point_lattice(*value);
      case LawFamily::degenerate: break;
    }
  } catch (const InvalidLawError& e) {
    s.fail(e.parameter(), e.what());
  }
  return IncrementLaw::degenerate();
}

Regime parse_regime(Section& s) {
  const auto kind = s.string("kind");
  if (!kind) s.fail("kind", "missing required key");
  Regime r;
  if (*kind == "fixed_i") {
    const auto i = s.uint("i");
    if (!i) s.fail("i", "missing required key");
    r = Regime::fixed_i(*i);
  } else if (*kind == "fixed_gap") {
    const auto gap = s.uint("N", 1);
    if (!gap) s.fail("N", "missing required key");
    r = Regime::fixed_gap(*gap);
  } else if (*kind == "proportional") {
    const auto rho = s.real("rho");
    if (!rho) s.fail("rho", "missing required key");
    if (!(*rho > 0.0 && *rho < 1.0)) s.fail("rho", "must lie in (0, 1)");
    r = Regime::proportional(*rho);
  } else {
    s.fail("kind", "unknown regime kind '" + *kind + "'");
  }
  s.finish();
  return r;
}

SamplingTarget parse_precision(Section& s) {
  const auto rel = s.real("rel_se");
  const auto budget = s.uint("budget", 1);
  const auto nsamples = s.uint("nsamples", 1);
  s.finish();
  if (rel && nsamples) s.fail("nsamples", "give either rel_se or nsamples, not both");
  if (nsamples) return SamplingTarget::fixed(*nsamples);
  SamplingTarget t = SamplingTarget::relative(rel.value_or(0.03));
  if (!(t.rel_se > 0.0)) s.fail("rel_se", "must be > 0");
  if (budget) t.budget = *budget;
  return t;
}

WalkSeriesSpec parse_series(Section& s) {
  const auto kind = s.string("kind");
  if (!kind) s.fail("kind", "missing required key");
  WalkSeriesSpec spec;
  const auto k = WalkSeriesSpec::parse_kind(*kind);
  if (!k) s.fail("kind", "unknown series kind '" + *kind + "'");
  spec.kind = *k;
  using K = WalkSeriesSpec::Kind;
  switch (spec.kind) {
    case K::tilted_tau:
      spec.lambda = s.real("lambda").value_or(1.0);
      spec.r_rho = s.real("r_rho").value_or(0.5);
      if (!(spec.lambda > 0.0)) s.fail("lambda", "must be > 0");
      if (!(spec.r_rho >= 0.0 && spec.r_rho <= 1.0)) s.fail("r_rho", "must lie in [0, 1]");
      break;
    case K::guivarch:
      spec.guivarch.alpha = s.real("alpha").value_or(1.0);
      spec.guivarch.beta = s.real("beta").value_or(1.0);
      spec.guivarch.epsilon = s.real("epsilon").value_or(1.0);
      break;
    case K::psi:
      spec.s = s.real("s").value_or(0.0);
      if (!(spec.s >= 0.0 && spec.s < 1.0)) s.fail("s", "must lie in [0, 1)");
      break;
    case K::t_of_x:
      spec.x = s.real("x").value_or(0.0);
      if (!(spec.x >= 0.0)) s.fail("x", "must be >= 0");
      break;
    default:
      break;
  }
  s.finish();
  return spec;
}

RenewalSpec parse_renewal(Section& s) {
  RenewalSpec r;
  const auto which = s.string("which");
  if (!which) s.fail("which", "missing required key");
  if (*which == "U") {
    r.which = RenewalTable::Kind::U;
  } else if (*which == "V") {
    r.which = RenewalTable::Kind::V;
  } else {
    s.fail("which", "expected \"U\" or \"V\"");
  }
  const auto grid = s.reals("grid");
  if (!grid || grid->empty()) s.fail("grid", "missing or empty grid");
  for (double x : *grid) {
    if (r.which == RenewalTable::Kind::U ? x < 0.0 : x > 0.0) {
      s.fail("grid", r.which == RenewalTable::Kind::U ? "U grid points must be >= 0"
                                                       : "V grid points must be <= 0");
    }
  }
  r.grid = *grid;
  r.paths = s.uint("paths", 1).value_or(r.paths);
  r.cap = s.uint("cap", 1).value_or(r.cap);
  s.finish();
  return r;
}

OracleSpec parse_oracle(Section& s) {
  OracleSpec o;
  o.env_samples = s.uint("env_samples", 1).value_or(o.env_samples);
  o.reps = s.uint("reps", 1).value_or(o.reps);
  s.finish();
  return o;
}

IdentitiesSpec parse_identities(Section& s) {
  IdentitiesSpec d;
  d.walk_paths = s.uint("walk_paths", 1).value_or(d.walk_paths);
  d.duality_n = s.uint("duality_n", 1).value_or(d.duality_n);
  d.decomposition_envs = s.uint("decomposition_envs", 1).value_or(d.decomposition_envs);
  d.branch_reps = s.uint("branch_reps", 1).value_or(d.branch_reps);
  d.renewal_paths = s.uint("renewal_paths", 1).value_or(d.renewal_paths);
  d.harmonicity_reps = s.uint("harmonicity_reps", 1).value_or(d.harmonicity_reps);
  d.relation_paths = s.uint("relation_paths", 1).value_or(d.relation_paths);
  s.finish();
  return d;
}

void check_grid(Section& s, const std::vector<std::size_t>& grid, std::size_t min_points) {
  if (grid.size() < min_points) {
    s.fail("n_grid", "needs at least " + std::to_string(min_points) + " points");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (grid[k] <= grid[k - 1]) s.fail("n_grid", "must be strictly increasing");
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("", e.source().begin.line, std::string(e.description()));
  }
  ExperimentConfig c;
  c.config_hash = fnv1a64(text);
  Section top(root, "");

  const auto kind_name = top.string("kind");
  if (kind_name) {
    const auto k = parse_experiment_kind(*kind_name);
    if (!k) top.fail("kind", "unknown experiment kind '" + *kind_name + "'");
    if (expected && *expected != *k) {
      top.fail("kind", "config is for '" + *kind_name + "' but '" +
                           std::string(to_string(*expected)) + "' was requested");
    }
    c.kind = *k;
  } else if (expected) {
    c.kind = *expected;
  } else {
    throw ConfigError("kind", 0, "experiment kind not given");
  }
  using EK = ExperimentKind;
  const EK kind = c.kind;
  auto allowed = [&](std::string_view key, std::initializer_list<EK> kinds) {
    if (!top.has(key)) return false;
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
      top.fail(key, "key '" + std::string(key) + "' is not used by kind '" +
                        std::string(to_string(kind)) + "'");
    }
    return true;
  };
  auto required = [&](std::string_view key) {
    if (!top.has(key)) top.fail(key, "missing required key for kind '" + std::string(to_string(kind)) + "'");
  };

  if (auto seed = top.uint("seed")) c.seed = *seed;
  if (auto w = top.uint("workers", 1)) {
    if (*w > 1024) top.fail("workers", "must be <= 1024");
    c.workers = static_cast<unsigned>(*w);
  }
  if (auto out = top.string("out_dir")) c.out_dir = *out;
  if (auto f = top.string("format")) {
    const auto fmt = parse_output_format(*f);
    if (!fmt) top.fail("format", "expected \"csv\" or \"json\"");
    c.format = *fmt;
  }

  if (kind != EK::identities) required("law");
  if (top.has("law")) {
    auto s = top.table("law");
    c.law = parse_law(*s);
  }

  if (allowed("convention", {EK::estimate, EK::sweep})) {
    const auto name = top.string("convention");
    const auto conv = parse_convention(*name);
    if (!conv) top.fail("convention", "expected \"paper_corollary\" or \"strict\"");
    c.convention = *conv;
  }
  if (allowed("estimator", {EK::estimate})) {
    const auto name = *top.string("estimator");
    if (name == "reversed") {
      c.reversed = true;
    } else if (name != "direct") {
      top.fail("estimator", "expected \"direct\" or \"reversed\"");
    }
  }

  if (kind == EK::estimate || kind == EK::sweep) required("regime");
  if (allowed("regime", {EK::estimate, EK::sweep})) {
    auto s = top.table("regime");
    c.regime = parse_regime(*s);
  }
  if (kind == EK::estimate || kind == EK::oracle) required("n");
  if (allowed("n", {EK::estimate, EK::oracle})) {
    c.n = *top.uint("n", kind == EK::oracle ? 1 : 2);
    if (kind == EK::oracle && c.n > 64) top.fail("n", "oracle runs are limited to n <= 64");
  }
  if (kind == EK::sweep || kind == EK::walkseries) required("n_grid");
  if (allowed("n_grid", {EK::sweep, EK::walkseries})) {
    c.n_grid = *top.sizes("n_grid");
    check_grid(top, c.n_grid, 3);
  }
  if (allowed("precision", {EK::estimate, EK::sweep, EK::walkseries})) {
    auto s = top.table("precision");
    c.target = parse_precision(*s);
  }
  if (kind == EK::walkseries) required("series");
  if (allowed("series", {EK::walkseries})) {
    auto s = top.table("series");
    c.series = parse_series(*s);
    if (c.series.kind == WalkSeriesSpec::Kind::guivarch) {
      try {
        c.series.guivarch.validate(c.law);
      } catch (const DomainError& e) {
        top.fail("series", e.what());
      }
    }
  }
  if (kind == EK::renewal) required("renewal");
  if (allowed("renewal", {EK::renewal})) {
    auto s = top.table("renewal");
    c.renewal = parse_renewal(*s);
  }
  if (allowed("oracle", {EK::oracle})) {
    auto s = top.table("oracle");
    c.oracle = parse_oracle(*s);
  }
  if (allowed("identities", {EK::identities})) {
    auto s = top.table("identities");
    c.identities = parse_identities(*s);
  }
  top.finish();

  // Cross-field checks that would otherwise fail mid-run.
  if (kind == EK::estimate || kind == EK::sweep) {
    const std::vector<std::size_t> ns = kind == EK::estimate ? std::vector<std::size_t>{c.n} : c.n_grid;
    for (std::size_t n : ns) {
      try {
        (void)c.regime.resolve(n);
      } catch (const DomainError& e) {
        throw ConfigError("regime", top.line("regime"), e.what());
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file, std::optional<ExperimentKind> expected) {
  std::string text;
  try {
    text = read_file(file);
  } catch (const std::exception& e) {
    throw ConfigError("", 0, e.what());
  }
  return parse_config(text, expected);
}

}  // namespace bpire

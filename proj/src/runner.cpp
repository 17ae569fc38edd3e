#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <nlohmann/json.hpp>

#include "bpire/asymptotics.hpp"
#include "bpire/conditioned.hpp"
#include "bpire/config.hpp"
#include "bpire/errors.hpp"
#include "bpire/io.hpp"
#include "bpire/logsumexp.hpp"
#include "bpire/popsim.hpp"

#ifndef BPIRE_VERSION
#define BPIRE_VERSION "0.0.0"
#endif

namespace bpire {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kManifest = "manifest.json";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json law_json(const IncrementLaw& law) {
  json j;
  j["family"] = std::string(to_string(law.family()));
  if (law.family() != LawFamily::degenerate) j[std::string(law.parameter_name())] = law.parameter();
  return j;
}

json result_json(const EstimatorResult& r) {
  json j;
  j["estimate"] = r.mean;
  j["stderr"] = r.std_error;
  j["nsamples"] = r.nsamples;
  j["seed"] = r.master_seed;
  j["budget_exceeded"] = r.budget_exceeded;
  return j;
}

json series_json(const ScalingSeries& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    json row;
    row["n"] = r.n;
    row["i"] = r.i;
    const json res = result_json(r.result);
    for (const auto& [k, v] : res.items()) row[k] = v;
    rows.push_back(row);
  }
  json j;
  j["label"] = s.label;
  j["rows"] = rows;
  return j;
}

json fit_json(const SlopeFit& fit) {
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["ci95"] = fit.ci95;
  j["r2"] = fit.r2;
  j["points"] = fit.points;
  return j;
}

// Collects artifacts for one run; every file goes through write_file_atomic.
class ArtifactSink {
 public:
  explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    files_.emplace_back(name, fnv1a64(content));
  }

  void object(const std::string& name, json j) {
    j["manifest"] = kManifest;
    text(name, j.dump(2) + "\n");
  }

  void warn(std::string w) { warnings_.push_back(std::move(w)); }

  std::vector<fs::path> finish(const ExperimentConfig& c, unsigned workers, double wall,
                               const std::string& status, const std::string& message) {
    json m;
    m["tool"] = "bpire";
    m["version"] = BPIRE_VERSION;
    m["kind"] = std::string(to_string(c.kind));
    m["config_hash"] = hex64(c.config_hash);
    m["seed"] = c.seed;
    m["workers"] = workers;
    m["wall_time_s"] = wall;
    m["status"] = status;
    if (!message.empty()) m["message"] = message;
    json arts = json::array();
    for (const auto& [name, hash] : files_) arts.push_back({{"file", name}, {"fnv1a", hex64(hash)}});
    m["artifacts"] = arts;
    m["warnings"] = warnings_;
    write_file_atomic(dir_ / kManifest, m.dump(2) + "\n");
    std::vector<fs::path> out;
    for (const auto& f : files_) out.emplace_back(f.first);
    out.emplace_back(kManifest);
    return out;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::uint64_t>> files_;
  std::vector<std::string> warnings_;
};

void note_budget(ArtifactSink& sink, const ScalingSeries& s) {
  for (const auto& r : s.rows) {
    if (r.result.budget_exceeded) {
      sink.warn("sample budget exhausted at n=" + std::to_string(r.n) + " (relative se " +
                format_double(r.result.relative_se()) + ")");
    }
  }
}

void emit_series(ArtifactSink& sink, const ExperimentConfig& c, const ScalingSeries& series) {
  const SlopeFit fit = fit_log_slope(series);
  if (c.format == OutputFormat::csv) {
    sink.text("series.csv", series_csv(series));
  } else {
    sink.object("series.json", series_json(series));
  }
  json slope = fit_json(fit);
  slope["label"] = series.label;
  sink.object("slope.json", slope);
  sink.text("plot_data.csv", plot_data_csv(series, fit));
  note_budget(sink, series);
}

void run_validate(const ExperimentConfig& c, ArtifactSink& sink) {
  const HypothesisReport rep = validate_hypotheses(c.law);
  json j;
  j["law"] = law_json(c.law);
  j["a1_ok"] = rep.a1_ok;
  j["a2_ok"] = rep.a2_ok;
  j["a3_ok"] = rep.a3_ok;
  j["moments"] = {{"mean", rep.moments.mean},
                  {"variance", rep.moments.variance},
                  {"exp_plus", rep.moments.exp_plus},
                  {"exp_minus", rep.moments.exp_minus}};
  j["notes"] = rep.notes;
  sink.object("report.json", j);
}

void run_estimate(const ExperimentConfig& c, unsigned workers, ArtifactSink& sink) {
  const StreamKey key = StreamKey::root(c.seed).child(c.n);
  ScalingSeries s;
  s.label = c.regime.describe() + (c.reversed ? " reversed" : "");
  ScalingRow row;
  row.n = c.n;
  row.i = c.regime.resolve(c.n);
  row.result = c.reversed ? estimate_event_prob_reversed(c.law, c.regime, c.n, c.target, key, workers)
                          : estimate_event_prob(c.law, c.regime, c.n, c.target, c.convention, key, workers);
  s.rows.push_back(row);
  if (c.format == OutputFormat::csv) {
    sink.text("estimate.csv", series_csv(s));
  } else {
    json j = series_json(s);
    j["convention"] = std::string(to_string(c.convention));
    sink.object("estimate.json", j);
  }
  note_budget(sink, s);
}

void run_sweep(const ExperimentConfig& c, unsigned workers, ArtifactSink& sink) {
  const ScalingSeries series = scaling_sweep(c.law, c.regime, c.n_grid, c.target, c.convention,
                                             StreamKey::root(c.seed), workers);
  emit_series(sink, c, series);
}

void run_walkseries(const ExperimentConfig& c, unsigned workers, ArtifactSink& sink) {
  const ScalingSeries series = walk_functional_series(c.law, c.series, c.n_grid, c.target,
                                                      StreamKey::root(c.seed), workers);
  emit_series(sink, c, series);
}

void run_renewal(const ExperimentConfig& c, unsigned workers, ArtifactSink& sink) {
  const RenewalSpec& r = c.renewal;
  const StreamKey key = StreamKey::root(c.seed);
  const RenewalTable table = r.which == RenewalTable::Kind::U
                                 ? estimate_U(c.law, r.grid, r.paths, r.cap, key, workers)
                                 : estimate_V(c.law, r.grid, r.paths, r.cap, key, workers);
  if (c.format == OutputFormat::csv) {
    sink.text("renewal.csv", renewal_csv(table));
  } else {
    json j;
    j["kind"] = r.which == RenewalTable::Kind::U ? "U" : "V";
    j["cap"] = table.cap;
    j["paths"] = table.paths;
    j["seed"] = table.seed;
    j["truncated_fraction"] = table.truncated_fraction;
    j["x"] = table.grid;
    j["value"] = table.values;
    j["stderr"] = table.stderr_values;
    sink.object("renewal.json", j);
  }
  if (table.truncated_fraction > 0.01) {
    sink.warn("truncated_fraction " + format_double(table.truncated_fraction) + " exceeds 0.01");
  }
}

void run_oracle(const ExperimentConfig& c, unsigned workers, ArtifactSink& sink) {
  const StreamKey key = StreamKey::root(c.seed);
  std::ostringstream csv;
  csv << "env,i,convention,freq,se,clan_prob,z\n";
  json rows = json::array();
  std::size_t cells = 0, within_strict = 0, within_paper = 0;
  for (std::size_t e = 0; e < c.oracle.env_samples; ++e) {
    RngStream env_rng(key.child(0).child(e));
    const WalkPath path = simulate_path(c.law, c.n, env_rng);
    const OracleProfile prof = oracle_profile(path, c.oracle.reps, key.child(1).child(e), workers);
    for (Convention conv : {Convention::strict, Convention::paper_corollary}) {
      const auto log_h = clan_log_probs(path, conv);
      const auto& freqs = conv == Convention::strict ? prof.strict : prof.paper;
      for (std::size_t i = 0; i < c.n; ++i) {
        const double h = std::exp(log_h[i]);
        const EventFrequency& f = freqs[i];
        // One-count resolution when no event was observed.
        const double se = f.se > 0.0 ? f.se : 1.0 / static_cast<double>(f.reps);
        const double z = (f.freq - h) / se;
        const bool ok = std::fabs(z) <= 4.0;
        if (conv == Convention::strict) {
          ++cells;
          within_strict += ok;
        } else {
          within_paper += ok;
        }
        const std::string cname(to_string(conv));
        csv << e << ',' << i << ',' << cname << ',' << format_double(f.freq) << ','
            << format_double(f.se) << ',' << format_double(h) << ',' << format_double(z) << '\n';
        rows.push_back({{"env", e}, {"i", i}, {"convention", cname}, {"freq", f.freq},
                        {"se", f.se}, {"clan_prob", h}, {"z", z}});
      }
    }
  }
  json summary;
  summary["n"] = c.n;
  summary["env_samples"] = c.oracle.env_samples;
  summary["reps"] = c.oracle.reps;
  summary["fraction_within_4se"] = {
      {"strict", static_cast<double>(within_strict) / static_cast<double>(cells)},
      {"paper_corollary", static_cast<double>(within_paper) / static_cast<double>(cells)}};
  if (c.format == OutputFormat::csv) {
    sink.text("oracle.csv", csv.str());
  } else {
    summary["rows"] = rows;
  }
  sink.object("oracle_summary.json", summary);
}

// Returns true when every check passed.
bool run_identities(const ExperimentConfig& c, unsigned workers, ArtifactSink& sink) {
  const IdentitiesSpec& d = c.identities;
  const StreamKey key = StreamKey::root(c.seed);
  const IncrementLaw& law = c.law;
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool passed, json details) {
    all = all && passed;
    checks.push_back({{"name", name}, {"passed", passed}, {"details", std::move(details)}});
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    checks.push_back({{"name", name}, {"passed", nullptr}, {"details", {{"skipped", why}}}});
  };

  // Sparre-Andersen values of P(L_n >= 0).
  if (law.is_lattice()) {
    skip("sparre_andersen", "needs a continuous law");
  } else {
    json rows = json::array();
    bool ok = true;
    for (std::size_t n : {1, 2, 5, 10}) {
      WalkSeriesSpec spec;
      spec.kind = WalkSeriesSpec::Kind::prob_min_nonneg;
      const auto r = estimate_mean(key.child(1).child(n), SamplingTarget::fixed(d.walk_paths), workers,
                                   [&](RngStream& rng, WalkPath& path) {
                                     path.resample(law, n, rng);
                                     return walk_series_sample(spec, path);
                                   });
      const double exact = sparre_andersen_prob(n);
      const double z = (r.mean - exact) / r.std_error;
      ok = ok && std::fabs(z) <= 4.0;
      rows.push_back({{"n", n}, {"estimate", r.mean}, {"stderr", r.std_error}, {"exact", exact}, {"z", z}});
    }
    record("sparre_andersen", ok, rows);
  }

  // Duality and factorization of the first-minimum time.
  if (law.is_lattice()) {
    skip("duality", "needs a continuous law");
  } else {
    const DualityReport r = duality_check(law, d.duality_n, d.walk_paths, key.child(2), workers);
    record("duality", std::fabs(r.z) <= 4.0 && std::fabs(r.factor_z) <= 4.0,
           {{"n", d.duality_n}, {"p_tau", r.p_tau}, {"p_tau_se", r.p_tau_se}, {"p_max", r.p_max},
            {"p_max_se", r.p_max_se}, {"z", r.z}, {"r", r.r}, {"factor_lhs", r.factor_lhs},
            {"factor_rhs", r.factor_rhs}, {"factor_z", r.factor_z}});
  }

  // Clan decomposition against the population simulator.
  {
    const DecompositionReport r =
        decomposition_check(law, 8, d.decomposition_envs, d.branch_reps, key.child(3), workers);
    bool bounded = true;
    for (const auto& row : r.rows) bounded = bounded && row.sum_h_strict + row.no_survivor <= 1.0 + 1e-12;
    record("decomposition", bounded && r.fraction_within >= 0.9,
           {{"n", 8}, {"environments", r.rows.size()}, {"fraction_within_4se", r.fraction_within},
            {"max_abs_z", r.max_abs_z}, {"sum_bounded_by_one", bounded}});
  }

  // Harmonicity of the renewal tables.
  {
    std::vector<double> grid;
    for (int k = 0; k <= 24; ++k) grid.push_back(0.25 * k);
    const std::uint64_t cap = 100'000;
    const RenewalTable U = estimate_U(law, grid, d.renewal_paths, cap, key.child(4), workers);
    std::vector<double> vgrid;
    for (double x : grid) vgrid.push_back(-x);
    const RenewalTable V = estimate_V(law, vgrid, d.renewal_paths, cap, key.child(5), workers);
    json rows = json::array();
    bool ok = U(0.0) == 1.0 && V(0.0) == 1.0;
    std::uint64_t child = 0;
    for (const RenewalTable* t : {&U, &V}) {
      for (double x : {0.5, 1.0, 2.0}) {
        const double at = t == &U ? x : -x;
        const auto h = harmonicity_residual(law, *t, at, d.harmonicity_reps, key.child(6).child(child++), workers);
        const double se = std::hypot(h.se, h.table_se);
        const double z = se > 0.0 ? h.residual / se : 0.0;
        ok = ok && std::fabs(z) <= 4.0;
        rows.push_back({{"table", t == &U ? "U" : "V"}, {"x", at}, {"residual", h.residual},
                        {"se", h.se}, {"table_se", h.table_se}, {"z", z}});
      }
    }
    record("harmonicity", ok, rows);
  }

  // Exact relation between the two conventions: paper/strict = D_0/D_1 for i >= 1, 1 for i = 0.
  {
    double worst = 0.0;
    RngStream rng(key.child(7));
    for (std::size_t p = 0; p < d.relation_paths; ++p) {
      const std::size_t n = 2 + p % 31;
      const WalkPath path = simulate_path(law, n, rng);
      const auto paper = clan_log_probs(path, Convention::paper_corollary);
      const auto strict = clan_log_probs(path, Convention::strict);
      LogSumExp d1;
      for (std::size_t k = 1; k <= n; ++k) d1.add(-path.S(k));
      LogSumExp d0 = d1;
      d0.add(0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double expected = i == 0 ? 0.0 : d0.value() - d1.value();
        worst = std::max(worst, std::fabs(std::expm1(paper[i] - strict[i] - expected)));
      }
    }
    record("convention_relation", worst <= 1e-12, {{"paths", d.relation_paths}, {"max_rel_error", worst}});
  }

  json j;
  j["law"] = law_json(law);
  j["all_passed"] = all;
  j["checks"] = checks;
  sink.object("identities.json", j);
  return all;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c) {
  const unsigned workers = c.workers.value_or(default_workers());
  const auto start = std::chrono::steady_clock::now();
  ArtifactSink sink(c.out_dir);
  RunResult result;
  std::string status = "ok";
  try {
    switch (c.kind) {
      case ExperimentKind::validate: run_validate(c, sink); break;
      case ExperimentKind::estimate: run_estimate(c, workers, sink); break;
      case ExperimentKind::sweep: run_sweep(c, workers, sink); break;
      case ExperimentKind::walkseries: run_walkseries(c, workers, sink); break;
      case ExperimentKind::renewal: run_renewal(c, workers, sink); break;
      case ExperimentKind::oracle: run_oracle(c, workers, sink); break;
      case ExperimentKind::identities:
        if (!run_identities(c, workers, sink)) {
          result.exit_code = 3;
          status = "identity_violation";
          result.message = "identity check failed; see identities.json";
        }
        break;
    }
  } catch (const PopulationOverflowError& e) {
    result.exit_code = 2;
    status = "numeric_failure";
    result.message = std::string("population overflow: ") + e.what();
  } catch (const NoSampleError& e) {
    result.exit_code = 2;
    status = "numeric_failure";
    result.message = std::string("no accepted samples: ") + e.what();
  } catch (const FitError& e) {
    result.exit_code = 2;
    status = "numeric_failure";
    result.message = std::string("slope fit failed: ") + e.what();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.artifacts = sink.finish(c, workers, wall, status, result.message);
  return result;
}

RunResult run_experiment(const fs::path& config_file, std::optional<ExperimentKind> expected) {
  try {
    return run_experiment(load_config(config_file, expected));
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = 1;
    r.message = e.what();
    return r;
  }
}

}  // namespace bpire

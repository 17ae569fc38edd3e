#include "bpire/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "bpire/errors.hpp"
#include "bpire/io.hpp"
#include "bpire/logsumexp.hpp"
#include "bpire/popsim.hpp"

namespace bpire {

std::size_t Regime::resolve(std::size_t n) const {
  if (n < 2) throw DomainError("regime: n must be >= 2");
  switch (kind) {
    case Kind::fixed_i:
      if (index > n - 1) {
        throw DomainError("fixed_i(" + std::to_string(index) + ") needs i <= n-1 at n=" +
                          std::to_string(n));
      }
      return index;
    case Kind::fixed_gap:
      if (index < 1 || index > n - 1) {
        throw DomainError("fixed_gap(" + std::to_string(index) + ") needs 1 <= N <= n-1 at n=" +
                          std::to_string(n));
      }
      return n - index;
    case Kind::proportional: {
      if (!(rho > 0.0 && rho < 1.0)) throw DomainError("proportional regime needs rho in (0, 1)");
      const auto i = static_cast<std::size_t>(std::floor(rho * static_cast<double>(n)));
      if (i > n - 1) throw DomainError("proportional regime resolves outside [0, n-1]");
      return i;
    }
  }
  return 0;
}

std::string Regime::describe() const {
  switch (kind) {
    case Kind::fixed_i: return "fixed_i(" + std::to_string(index) + ")";
    case Kind::fixed_gap: return "fixed_gap(" + std::to_string(index) + ")";
    case Kind::proportional: return "proportional(" + format_double(rho) + ")";
  }
  return "";
}

EstimatorResult estimate_event_prob(const IncrementLaw& law, const Regime& regime, std::size_t n,
                                    const SamplingTarget& target, Convention convention,
                                    StreamKey key, unsigned workers) {
  const std::size_t i = regime.resolve(n);
  return estimate_mean(key, target, workers, [&](RngStream& rng, WalkPath& path) {
    path.resample(law, n, rng);
    return clan_prob(path, i, convention).value();
  });
}

EstimatorResult estimate_event_prob_reversed(const IncrementLaw& law, const Regime& regime,
                                             std::size_t n, const SamplingTarget& target,
                                             StreamKey key, unsigned workers) {
  const std::size_t j = n - regime.resolve(n);
  return estimate_mean(key, target, workers, [&](RngStream& rng, WalkPath& path) {
    path.resample(law, n, rng);
    return reversed_rep_weight(path, j);
  });
}

namespace {

void check_grid(const std::vector<std::size_t>& n_grid) {
  if (n_grid.empty()) throw DomainError("n_grid must not be empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw DomainError("n_grid entries must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw DomainError("n_grid must be strictly increasing");
  }
}

}  // namespace

ScalingSeries scaling_sweep(const IncrementLaw& law, const Regime& regime,
                            const std::vector<std::size_t>& n_grid, const SamplingTarget& target,
                            Convention convention, StreamKey key, unsigned workers) {
  check_grid(n_grid);
  for (std::size_t n : n_grid) (void)regime.resolve(n);  // validate before any work
  ScalingSeries series;
  series.label = regime.describe();
  for (std::size_t n : n_grid) {
    ScalingRow row;
    row.n = n;
    row.i = regime.resolve(n);
    row.result = estimate_event_prob(law, regime, n, target, convention, key.child(n), workers);
    series.rows.push_back(row);
  }
  return series;
}

SlopeFit fit_log_slope(const ScalingSeries& series) {
  const std::size_t m = series.rows.size();
  if (m < 3) throw FitError("fit_log_slope: need at least 3 rows");
  std::vector<double> x(m), y(m), w(m);
  bool weighted = true;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& r = series.rows[k];
    if (!(r.result.mean > 0.0) || r.n == 0) {
      throw FitError("fit_log_slope: estimate at n=" + std::to_string(r.n) + " is not positive");
    }
    x[k] = std::log(static_cast<double>(r.n));
    y[k] = std::log(r.result.mean);
    if (!(r.result.std_error > 0.0)) weighted = false;
    w[k] = weighted ? std::pow(r.result.mean / r.result.std_error, 2) : 1.0;
  }
  if (!weighted) std::fill(w.begin(), w.end(), 1.0);

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sw += w[k];
    sx += w[k] * x[k];
    sy += w[k] * y[k];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += w[k] * (x[k] - xbar) * (x[k] - xbar);
    sxy += w[k] * (x[k] - xbar) * (y[k] - ybar);
    syy += w[k] * (y[k] - ybar) * (y[k] - ybar);
  }
  if (!(sxx > 0.0)) throw FitError("fit_log_slope: all n are equal");

  SlopeFit fit;
  fit.points = m;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double chi2 = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double r = y[k] - fit.intercept - fit.slope * x[k];
    chi2 += w[k] * r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - chi2 / syy, 0.0, 1.0) : 1.0;
  const double dof = static_cast<double>(m - 2);
  // Inverse-variance weights carry the scale; inflate by the reduced chi^2 when it exceeds 1.
  const double s2 = weighted ? std::max(1.0, chi2 / dof) : chi2 / dof;
  const boost::math::students_t t(dof);
  const double tq = boost::math::quantile(t, 0.975);
  fit.ci95 = tq * std::sqrt(s2 / sxx);
  fit.ci95 = std::max(fit.ci95, 64.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(1.0, std::fabs(fit.slope)));
  return fit;
}

void GuivarchFunctional::validate(const IncrementLaw& law) const {
  if (!(alpha > 0.0 && beta > 0.0 && epsilon > 0.0)) {
    throw DomainError("guivarch functional: alpha, beta, epsilon must be > 0");
  }
  if (!std::isfinite(law.mgf(alpha))) throw DomainError("guivarch functional: E[eta^alpha] is infinite");
  if (!std::isfinite(law.mgf(-epsilon))) {
    throw DomainError("guivarch functional: E[eta^-epsilon] is infinite");
  }
}

std::optional<WalkSeriesSpec::Kind> WalkSeriesSpec::parse_kind(std::string_view name) {
  using K = Kind;
  if (name == "prob_min_nonneg") return K::prob_min_nonneg;
  if (name == "exp_neg_min") return K::exp_neg_min;
  if (name == "exp_pos_max") return K::exp_pos_max;
  if (name == "tilted_tau") return K::tilted_tau;
  if (name == "guivarch") return K::guivarch;
  if (name == "psi") return K::psi;
  if (name == "t_of_x") return K::t_of_x;
  return std::nullopt;
}

std::string WalkSeriesSpec::describe() const {
  switch (kind) {
    case Kind::prob_min_nonneg: return "prob_min_nonneg";
    case Kind::exp_neg_min: return "exp_neg_min";
    case Kind::exp_pos_max: return "exp_pos_max";
    case Kind::tilted_tau:
      return "tilted_tau(lambda=" + format_double(lambda) + ",r_rho=" + format_double(r_rho) + ")";
    case Kind::guivarch:
      return "guivarch(alpha=" + format_double(guivarch.alpha) + ",beta=" +
             format_double(guivarch.beta) + ")";
    case Kind::psi: return "psi(s=" + format_double(s) + ")";
    case Kind::t_of_x: return "t_of_x(x=" + format_double(x) + ")";
  }
  return "";
}

std::size_t WalkSeriesSpec::r_at(std::size_t n) const {
  if (kind != Kind::tilted_tau) return 0;
  return static_cast<std::size_t>(std::floor(r_rho * static_cast<double>(n)));
}

double walk_series_sample(const WalkSeriesSpec& spec, const WalkPath& path) {
  const auto s = path.partial_sums();
  const std::size_t n = path.n();
  using K = WalkSeriesSpec::Kind;
  switch (spec.kind) {
    case K::prob_min_nonneg:
      return *std::min_element(s.begin(), s.end()) >= 0.0 ? 1.0 : 0.0;
    case K::exp_neg_min:
      return *std::min_element(s.begin(), s.end()) >= 0.0 ? std::exp(-s[n]) : 0.0;
    case K::exp_pos_max:
      return *std::max_element(s.begin() + 1, s.end()) < 0.0 ? std::exp(s[n]) : 0.0;
    case K::tilted_tau: {
      const std::size_t r = spec.r_at(n);
      return first_argmin(s, n) == r ? std::exp(spec.lambda * s[r]) : 0.0;
    }
    case K::guivarch: {
      // Upsilon_n = e^{S_n}, Lambda_n = sum_{k=1}^n e^{S_k}
      LogSumExp acc;
      acc.add(0.0);
      for (std::size_t k = 1; k <= n; ++k) acc.add(s[k]);
      return std::exp(spec.guivarch.alpha * s[n] - spec.guivarch.beta * acc.value());
    }
    case K::psi: {
      const double t = -std::log1p(-spec.s);
      LogSumExp acc;
      acc.add(t);
      for (std::size_t k = 1; k < n; ++k) acc.add(-s[k]);
      return std::exp(t - acc.value());
    }
    case K::t_of_x: {
      // a_n / ((a_n + b_n)(x + a_n + b_n)), a_n + b_n = sum_{k=0}^n e^{-S_k}
      LogSumExp acc;
      for (std::size_t k = 0; k <= n; ++k) acc.add(-s[k]);
      const double d0 = acc.value();
      const double lx = spec.x > 0.0 ? std::log(spec.x) : -std::numeric_limits<double>::infinity();
      return std::exp(-s[n] - d0 - log_add(lx, d0));
    }
  }
  return 0.0;
}

namespace {

// Walk killed at the barrier: upper = false keeps S_k >= 0, upper = true keeps
// S_k < 0 (k = 1..n). Returns e^{sign S_n} on survival, 0 otherwise.
double barrier_sample(const IncrementLaw& law, std::size_t n, bool upper, double sign,
                      RngStream& rng) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s += law.sample(rng);
    if (upper ? s >= 0.0 : s < 0.0) return 0.0;
  }
  return std::exp(sign * s);
}

// E[e^{lambda S_r}; tau(n) = r] = E[e^{lambda S_r}; tau(r) = r] P(L_{n-r} >= 0).
// The first factor is E[e^{lambda S_r}; M_r < 0] by time reversal; both
// factors are estimated independently and multiplied.
EstimatorResult tilted_tau_estimate(const IncrementLaw& law, double lambda, std::size_t n,
                                    std::size_t r, const SamplingTarget& target, StreamKey key,
                                    unsigned workers) {
  SamplingTarget part = target;
  if (target.adaptive()) part.rel_se = target.rel_se / std::sqrt(2.0);
  EstimatorResult one;
  one.mean = 1.0;
  EstimatorResult head = one;
  EstimatorResult tail = one;
  if (r > 0) {
    head = estimate_mean(key.child(0), part, workers, [&](RngStream& rng, WalkPath&) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        s += law.sample(rng);
        if (s >= 0.0) return 0.0;
      }
      return std::exp(lambda * s);
    });
  }
  if (n > r) {
    tail = estimate_mean(key.child(1), part, workers, [&](RngStream& rng, WalkPath&) {
      return barrier_sample(law, n - r, false, 0.0, rng);
    });
  }
  EstimatorResult out;
  out.mean = head.mean * tail.mean;
  const double vh = head.std_error * head.std_error;
  const double vt = tail.std_error * tail.std_error;
  out.std_error = std::sqrt(head.mean * head.mean * vt + tail.mean * tail.mean * vh + vh * vt);
  out.nsamples = head.nsamples + tail.nsamples;
  out.master_seed = key.master_seed();
  out.batches = head.batches + tail.batches;
  out.budget_exceeded = head.budget_exceeded || tail.budget_exceeded;
  return out;
}

}  // namespace

ScalingSeries walk_functional_series(const IncrementLaw& law, const WalkSeriesSpec& spec,
                                     const std::vector<std::size_t>& n_grid,
                                     const SamplingTarget& target, StreamKey key,
                                     unsigned workers) {
  check_grid(n_grid);
  using K = WalkSeriesSpec::Kind;
  if (spec.kind == K::tilted_tau) {
    if (!(spec.lambda > 0.0)) throw DomainError("tilted_tau: lambda must be > 0");
    if (!(spec.r_rho >= 0.0 && spec.r_rho <= 1.0)) throw DomainError("tilted_tau: r_rho must lie in [0, 1]");
  }
  if (spec.kind == K::psi && !(spec.s >= 0.0 && spec.s < 1.0)) {
    throw DomainError("psi: s must lie in [0, 1)");
  }
  if (spec.kind == K::t_of_x && !(spec.x >= 0.0)) throw DomainError("t_of_x: x must be >= 0");
  if (spec.kind == K::guivarch) spec.guivarch.validate(law);

  ScalingSeries series;
  series.label = spec.describe();
  for (std::size_t n : n_grid) {
    ScalingRow row;
    row.n = n;
    row.i = spec.r_at(n);
    switch (spec.kind) {
      case K::prob_min_nonneg:
      case K::exp_neg_min:
      case K::exp_pos_max: {
        const bool upper = spec.kind == K::exp_pos_max;
        const double sign = spec.kind == K::prob_min_nonneg ? 0.0 : (upper ? 1.0 : -1.0);
        row.result = estimate_mean(key.child(n), target, workers, [&](RngStream& rng, WalkPath&) {
          return barrier_sample(law, n, upper, sign, rng);
        });
        break;
      }
      case K::tilted_tau:
        row.result = tilted_tau_estimate(law, spec.lambda, n, row.i, target, key.child(n), workers);
        break;
      default:
        row.result = estimate_mean(key.child(n), target, workers, [&](RngStream& rng, WalkPath& path) {
          path.resample(law, n, rng);
          return walk_series_sample(spec, path);
        });
    }
    series.rows.push_back(row);
  }
  return series;
}

namespace {

void check_window_args(std::size_t j, std::size_t n, std::size_t N, bool need_N) {
  if (!(j >= 1 && j < n)) throw DomainError("tau window: need 1 <= j < n");
  if (need_N && (N < 1 || N > std::min(j / 2, n - j))) {
    throw DomainError("tau window: N must lie in [1, min(j/2, n-j)], got N=" + std::to_string(N));
  }
}

// Integrand value and the first argmin of W = -S on [0, n].
struct WindowSample {
  double value;
  std::size_t tau;
};

WindowSample window_sample(const WalkPath& path, std::size_t j, WindowIntegrand integrand) {
  const auto s = path.partial_sums();
  const std::size_t n = path.n();
  const std::size_t tau = first_argmax(s, n);
  double value;
  if (integrand == WindowIntegrand::clan_form) {
    value = reversed_rep_weight(path, j);
  } else {
    const std::size_t tau_j1 = first_argmax(s, j - 1);
    value = std::exp(s[j] - s[tau_j1] - s[tau]);
  }
  return {value, tau};
}

bool in_window(std::size_t tau, TauWindow window, std::size_t j, std::size_t n, std::size_t N) {
  const bool k1 = tau >= N && tau <= j - N;
  const bool k2 = tau >= j + N && tau <= n;
  switch (window) {
    case TauWindow::k1: return k1;
    case TauWindow::k2: return k2;
    case TauWindow::k1_or_k2: return k1 || k2;
    case TauWindow::full: return true;
  }
  return false;
}

}  // namespace

EstimatorResult tau_window_contribution(const IncrementLaw& law, std::size_t j, std::size_t n,
                                        TauWindow window, std::size_t N,
                                        WindowIntegrand integrand, const SamplingTarget& target,
                                        StreamKey key, unsigned workers) {
  check_window_args(j, n, N, window != TauWindow::full);
  return estimate_mean(key, target, workers, [&](RngStream& rng, WalkPath& path) {
    path.resample(law, n, rng);
    const WindowSample ws = window_sample(path, j, integrand);
    return in_window(ws.tau, window, j, n, N) ? ws.value : 0.0;
  });
}

namespace {

struct ProfileAcc {
  Moments full;
  double full_sum = 0.0;
  std::vector<Moments> window;
  std::vector<double> window_sum;
  void merge(const ProfileAcc& o) {
    if (window.empty()) {
      *this = o;
      return;
    }
    full.merge(o.full);
    full_sum += o.full_sum;
    for (std::size_t k = 0; k < window.size(); ++k) {
      window[k].merge(o.window[k]);
      window_sum[k] += o.window_sum[k];
    }
  }
};

}  // namespace

WindowProfile tau_window_profile(const IncrementLaw& law, std::size_t j, std::size_t n,
                                 const std::vector<std::size_t>& Ns, WindowIntegrand integrand,
                                 std::uint64_t nsamples, StreamKey key, unsigned workers) {
  if (Ns.empty()) throw DomainError("tau_window_profile: no N values");
  for (std::size_t N : Ns) check_window_args(j, n, N, true);
  if (nsamples == 0) throw DomainError("tau_window_profile: nsamples must be >= 1");
  const std::uint64_t nb = (nsamples + kBatchSize - 1) / kBatchSize;
  auto parts = run_batches<ProfileAcc>(0, nb, workers, [&](std::uint64_t b) {
    RngStream rng(key.child(b));
    WalkPath path;
    ProfileAcc acc;
    acc.window.resize(Ns.size());
    acc.window_sum.assign(Ns.size(), 0.0);
    const std::uint64_t k = batch_samples(b, nsamples);
    for (std::uint64_t r = 0; r < k; ++r) {
      path.resample(law, n, rng);
      const WindowSample ws = window_sample(path, j, integrand);
      acc.full.add(ws.value);
      acc.full_sum += ws.value;
      for (std::size_t q = 0; q < Ns.size(); ++q) {
        const double v = in_window(ws.tau, TauWindow::k1_or_k2, j, n, Ns[q]) ? ws.value : 0.0;
        acc.window[q].add(v);
        acc.window_sum[q] += v;
      }
    }
    return acc;
  });
  const ProfileAcc total = tree_reduce<ProfileAcc>(parts);
  WindowProfile out;
  out.full_mean = total.full.mean;
  out.full_se = total.full.std_error();
  out.nsamples = total.full.count;
  for (std::size_t q = 0; q < Ns.size(); ++q) {
    WindowProfileRow row;
    row.N = Ns[q];
    row.window_mean = total.window[q].mean;
    row.window_se = total.window[q].std_error();
    row.ratio = total.full_sum > 0.0 ? total.window_sum[q] / total.full_sum : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

DualityReport duality_check(const IncrementLaw& law, std::size_t n, std::uint64_t reps,
                            StreamKey key, unsigned workers, double lambda) {
  if (law.is_lattice()) throw DomainError("duality_check: lattice laws are refused");
  if (n < 1) throw DomainError("duality_check: n must be >= 1");
  if (reps == 0) throw DomainError("duality_check: reps must be >= 1");
  const auto target = SamplingTarget::fixed(reps);
  auto run = [&](std::uint64_t child, std::size_t len, auto&& f) {
    return estimate_mean(key.child(child), target, workers, [&](RngStream& rng, WalkPath& path) {
      if (len == 0) return f(path);
      path.resample(law, len, rng);
      return f(path);
    });
  };
  DualityReport rep;
  const auto p_tau = run(0, n, [&](const WalkPath& p) {
    return first_argmin(p.partial_sums(), n) == n ? 1.0 : 0.0;
  });
  const auto p_max = run(1, n, [&](const WalkPath& p) {
    const auto s = p.partial_sums();
    return *std::max_element(s.begin() + 1, s.end()) < 0.0 ? 1.0 : 0.0;
  });
  rep.p_tau = p_tau.mean;
  rep.p_tau_se = p_tau.std_error;
  rep.p_max = p_max.mean;
  rep.p_max_se = p_max.std_error;
  const double se = std::hypot(rep.p_tau_se, rep.p_max_se);
  rep.z = se > 0.0 ? (rep.p_tau - rep.p_max) / se : 0.0;

  const std::size_t r = n / 2;
  rep.r = r;
  rep.lambda = lambda;
  const auto lhs = run(2, n, [&](const WalkPath& p) {
    const auto s = p.partial_sums();
    return first_argmin(s, n) == r ? std::exp(lambda * s[r]) : 0.0;
  });
  const auto head = run(3, r, [&](const WalkPath& p) {
    if (r == 0) return 1.0;
    const auto s = p.partial_sums();
    return first_argmin(s, r) == r ? std::exp(lambda * s[r]) : 0.0;
  });
  const auto tail = run(4, n - r, [&](const WalkPath& p) {
    if (n - r == 0) return 1.0;
    const auto s = p.partial_sums();
    return *std::min_element(s.begin(), s.end()) >= 0.0 ? 1.0 : 0.0;
  });
  rep.factor_lhs = lhs.mean;
  rep.factor_lhs_se = lhs.std_error;
  rep.factor_rhs = head.mean * tail.mean;
  rep.factor_rhs_se = std::hypot(head.std_error * tail.mean, tail.std_error * head.mean);
  const double fse = std::hypot(rep.factor_lhs_se, rep.factor_rhs_se);
  rep.factor_z = fse > 0.0 ? (rep.factor_lhs - rep.factor_rhs) / fse : 0.0;
  return rep;
}

DecompositionReport decomposition_check(const IncrementLaw& law, std::size_t n,
                                        std::size_t env_samples, std::uint64_t branch_reps,
                                        StreamKey key, unsigned workers) {
  if (n < 1 || n > 16) throw DomainError("decomposition_check: n must lie in [1, 16]");
  if (env_samples == 0 || branch_reps == 0) {
    throw DomainError("decomposition_check: env_samples and branch_reps must be >= 1");
  }
  DecompositionReport report;
  std::size_t within = 0;
  for (std::size_t e = 0; e < env_samples; ++e) {
    RngStream env_rng(key.child(0).child(e));
    const WalkPath path = simulate_path(law, n, env_rng);
    DecompositionRow row;
    for (double lh : clan_log_probs(path, Convention::strict)) row.sum_h_strict += std::exp(lh);
    row.no_survivor = no_survivor_prob(path);
    const OracleProfile prof = oracle_profile(path, branch_reps, key.child(1).child(e), workers);
    row.multi_freq = prof.multi.freq;
    row.multi_se = prof.multi.se;
    row.deviation = row.sum_h_strict + row.no_survivor + row.multi_freq - 1.0;
    // One-count resolution when no multi-clan run was observed.
    const double se = row.multi_se > 0.0 ? row.multi_se : 1.0 / static_cast<double>(branch_reps);
    row.within = std::fabs(row.deviation) <= 4.0 * se;
    report.max_abs_z = std::max(report.max_abs_z, std::fabs(row.deviation) / se);
    within += row.within ? 1 : 0;
    report.rows.push_back(row);
  }
  report.fraction_within = static_cast<double>(within) / static_cast<double>(env_samples);
  return report;
}

double sparre_andersen_prob(std::size_t n) {
  double p = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    p *= (2.0 * static_cast<double>(k) - 1.0) / (2.0 * static_cast<double>(k));
  }
  return p;
}

std::string series_csv(const ScalingSeries& series) {
  std::ostringstream out;
  out << "n,i,estimate,stderr,nsamples,seed\n";
  for (const auto& r : series.rows) {
    out << r.n << ',' << r.i << ',' << format_double(r.result.mean) << ','
        << format_double(r.result.std_error) << ',' << r.result.nsamples << ','
        << r.result.master_seed << '\n';
  }
  return out.str();
}

std::string slope_json(const SlopeFit& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["ci95"] = fit.ci95;
  j["r2"] = fit.r2;
  j["points"] = fit.points;
  return j.dump(2) + "\n";
}

std::string plot_data_csv(const ScalingSeries& series, const SlopeFit& fit) {
  if (series.rows.empty()) throw FitError("plot data: empty series");
  std::ostringstream out;
  out << "log_n,log_est,log_fit\n";
  for (const auto& r : series.rows) {
    const double ln = std::log(static_cast<double>(r.n));
    out << format_double(ln) << ',' << format_double(std::log(r.result.mean)) << ','
        << format_double(fit.intercept + fit.slope * ln) << '\n';
  }
  return out.str();
}

void emit_plot_data(const ScalingSeries& series, const SlopeFit& fit,
                    const std::filesystem::path& out) {
  write_file_atomic(out, plot_data_csv(series, fit));
}

}  // namespace bpire

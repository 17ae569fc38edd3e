#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpire/engine.hpp"
#include "bpire/env.hpp"
#include "bpire/gfalgebra.hpp"

namespace bpire {

/// How the clan index i follows n in a scaling experiment.
struct Regime {
  enum class Kind { fixed_i, fixed_gap, proportional };
  Kind kind = Kind::fixed_i;
  std::size_t index = 0;  // i for fixed_i, N for fixed_gap
  double rho = 0.5;       // proportional: i = floor(rho n)

  static Regime fixed_i(std::size_t i) { return {Kind::fixed_i, i, 0.0}; }
  static Regime fixed_gap(std::size_t gap) { return {Kind::fixed_gap, gap, 0.0}; }
  static Regime proportional(double rho) { return {Kind::proportional, 0, rho}; }

  /// Clan index used at horizon n; DomainError when the regime is invalid at n.
  std::size_t resolve(std::size_t n) const;
  std::string describe() const;
};

struct ScalingRow {
  std::size_t n = 0;
  std::size_t i = 0;
  EstimatorResult result;
};

struct ScalingSeries {
  std::string label;
  std::vector<ScalingRow> rows;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci95 = 0.0;  // half-width of the 95% interval for the slope
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Mean of clan_prob(path, i, convention) over environment paths.
EstimatorResult estimate_event_prob(const IncrementLaw& law, const Regime& regime, std::size_t n,
                                    const SamplingTarget& target, Convention convention,
                                    StreamKey key, unsigned workers = 1);

/// Mean of reversed_rep_weight(path, n - i) over paths (paper convention).
EstimatorResult estimate_event_prob_reversed(const IncrementLaw& law, const Regime& regime,
                                             std::size_t n, const SamplingTarget& target,
                                             StreamKey key, unsigned workers = 1);

/// One estimate_event_prob row per n, each on sub-stream key.child(n).
ScalingSeries scaling_sweep(const IncrementLaw& law, const Regime& regime,
                            const std::vector<std::size_t>& n_grid, const SamplingTarget& target,
                            Convention convention, StreamKey key, unsigned workers = 1);

/// Weighted least squares of log(estimate) on log(n), weights (estimate/stderr)^2
/// (unit weights if any stderr is 0). Throws FitError for < 3 rows or a
/// nonpositive estimate.
SlopeFit fit_log_slope(const ScalingSeries& series);

/// Registered pair for E[g(Upsilon_n) h(Lambda_n)] with eta = e^X:
/// g(y) = y^alpha, h(y) = (1 + y)^{-beta}. Validated against the law's moments.
struct GuivarchFunctional {
  double alpha = 1.0;
  double beta = 1.0;
  double epsilon = 1.0;
  /// Throws DomainError if E[eta^alpha] or E[eta^{-epsilon}] is infinite
  /// under `law`, or a parameter is not positive.
  void validate(const IncrementLaw& law) const;
};

struct WalkSeriesSpec {
  enum class Kind { prob_min_nonneg, exp_neg_min, exp_pos_max, tilted_tau, guivarch, psi, t_of_x };
  Kind kind = Kind::prob_min_nonneg;
  double lambda = 1.0;    // tilted_tau
  double r_rho = 0.5;     // tilted_tau: r = floor(r_rho n)
  double s = 0.0;         // psi
  double x = 0.0;         // t_of_x
  GuivarchFunctional guivarch;

  static std::optional<Kind> parse_kind(std::string_view name);
  std::string describe() const;
  /// r used at horizon n for tilted_tau (0 for other kinds).
  std::size_t r_at(std::size_t n) const;
};

/// One sample of the series' path functional on a path of length n.
double walk_series_sample(const WalkSeriesSpec& spec, const WalkPath& path);

ScalingSeries walk_functional_series(const IncrementLaw& law, const WalkSeriesSpec& spec,
                                     const std::vector<std::size_t>& n_grid,
                                     const SamplingTarget& target, StreamKey key,
                                     unsigned workers = 1);

/// Windows of the reversed walk's first-minimum time (the first maximum of S).
enum class TauWindow { k1, k2, k1_or_k2, full };
/// walk_form: e^{-W_j + W_{t(j-1)} + W_{t(n)}}; clan_form: reversed_rep_weight,
/// where W = -S and t(m) is the first argmin of W on [0, m].
enum class WindowIntegrand { walk_form, clan_form };

/// Mean of integrand * 1{t(n) in window}. Throws DomainError unless
/// 1 <= j < n and 1 <= N <= min(j/2, n-j) (N is ignored for `full`).
EstimatorResult tau_window_contribution(const IncrementLaw& law, std::size_t j, std::size_t n,
                                        TauWindow window, std::size_t N,
                                        WindowIntegrand integrand, const SamplingTarget& target,
                                        StreamKey key, unsigned workers = 1);

struct WindowProfileRow {
  std::size_t N = 0;
  double window_mean = 0.0;
  double window_se = 0.0;
  double ratio = 0.0;  // (K1 u K2 contribution) / (full mean), common paths
};

struct WindowProfile {
  double full_mean = 0.0;
  double full_se = 0.0;
  std::uint64_t nsamples = 0;
  std::vector<WindowProfileRow> rows;
};

/// K1 u K2 contributions for several N on common paths. The ratios are built
/// from plain sums so they are exactly nonincreasing in N.
WindowProfile tau_window_profile(const IncrementLaw& law, std::size_t j, std::size_t n,
                                 const std::vector<std::size_t>& Ns, WindowIntegrand integrand,
                                 std::uint64_t nsamples, StreamKey key, unsigned workers = 1);

struct DualityReport {
  double p_tau = 0.0, p_tau_se = 0.0;  // P(tau(n) = n)
  double p_max = 0.0, p_max_se = 0.0;  // P(M_n < 0)
  double z = 0.0;
  std::size_t r = 0;
  double lambda = 1.0;
  double factor_lhs = 0.0, factor_lhs_se = 0.0;  // E[e^{lambda S_r}; tau(n) = r]
  double factor_rhs = 0.0, factor_rhs_se = 0.0;  // E[e^{lambda S_r}; tau(r) = r] P(L_{n-r} >= 0)
  double factor_z = 0.0;
};

/// Independent-stream checks of P(tau(n)=n) = P(M_n<0) and of the
/// factorization at r = floor(n/2). Lattice laws are refused.
DualityReport duality_check(const IncrementLaw& law, std::size_t n, std::uint64_t reps,
                            StreamKey key, unsigned workers = 1, double lambda = 1.0);

struct DecompositionRow {
  double sum_h_strict = 0.0;
  double no_survivor = 0.0;
  double multi_freq = 0.0;
  double multi_se = 0.0;
  double deviation = 0.0;  // sum_h + no_survivor + multi_freq - 1
  bool within = false;     // |deviation| <= 4 se
};

struct DecompositionReport {
  std::vector<DecompositionRow> rows;
  double fraction_within = 0.0;
  double max_abs_z = 0.0;
};

/// Per environment: strict clan probabilities + no-survivor probability +
/// simulated multi-clan mass against 1. n <= 16.
DecompositionReport decomposition_check(const IncrementLaw& law, std::size_t n,
                                        std::size_t env_samples, std::uint64_t branch_reps,
                                        StreamKey key, unsigned workers = 1);

/// C(2n, n) 4^{-n}, the distribution-free value of P(L_n >= 0).
double sparre_andersen_prob(std::size_t n);

/// CSV with header n,i,estimate,stderr,nsamples,seed.
std::string series_csv(const ScalingSeries& series);
/// JSON object with keys slope, intercept, ci95, r2, points.
std::string slope_json(const SlopeFit& fit);
/// Plot data: log_n,log_est,log_fit. Throws FitError for an empty series.
std::string plot_data_csv(const ScalingSeries& series, const SlopeFit& fit);
void emit_plot_data(const ScalingSeries& series, const SlopeFit& fit,
                    const std::filesystem::path& out);

}  // namespace bpire

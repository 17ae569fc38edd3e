#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "bpire/engine.hpp"
#include "bpire/env.hpp"

namespace bpire {

/// Tabulated estimate of U (x >= 0) or V (x <= 0). Points are ordered by |x|
/// ascending and the first point is always x = 0 with value exactly 1.
/// Between points the table interpolates linearly in |x|; beyond the last
/// point it extrapolates the line through the last two points.
struct RenewalTable {
  enum class Kind { U, V };

  Kind kind = Kind::U;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> stderr_values;
  std::uint64_t cap = 0;
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  double truncated_fraction = 0.0;

  /// Table with the same value everywhere (used to check quadrature).
  static RenewalTable constant(Kind kind, std::vector<double> grid, double value);

  /// Interpolated value at x; x must have the table's sign (x >= 0 for U,
  /// x <= 0 for V), otherwise DomainError.
  double operator()(double x) const;
  /// Interpolated standard error at x (same rules).
  double stderr_at(double x) const;
};

/// U(x) = 1 + sum_n P(S_n >= -x, M_n < 0), by counting the epochs before the
/// first nonnegative value of S (or `cap`). Throws DomainError for an empty
/// grid, negative grid points or cap = 0.
RenewalTable estimate_U(const IncrementLaw& law, std::vector<double> x_grid, std::uint64_t paths,
                        std::uint64_t cap, StreamKey key, unsigned workers = 1);

/// V(x) = 1 + sum_n P(S_n < -x, L_n >= 0), x <= 0; mirror image of estimate_U.
RenewalTable estimate_V(const IncrementLaw& law, std::vector<double> x_grid, std::uint64_t paths,
                        std::uint64_t cap, StreamKey key, unsigned workers = 1);

struct HarmonicityResidual {
  double residual = 0.0;
  double se = 0.0;        // from the draw variance only
  double table_se = 0.0;  // table standard error at x, reported separately
};

/// E[U(x+X); x+X >= 0] - U(x) for a U table, E[V(x+X); x+X < 0] - V(x) for a V table.
HarmonicityResidual harmonicity_residual(const IncrementLaw& law, const RenewalTable& table,
                                         double x, std::uint64_t reps, StreamKey key,
                                         unsigned workers = 1);

/// Bounded functional of a (shifted) path S_0..S_n.
class PathFunctional {
 public:
  enum class Kind { one, exp_neg_final, inv_one_plus_exp_sum, custom };

  static PathFunctional one() { return PathFunctional(Kind::one); }
  /// e^{-S_n}.
  static PathFunctional exp_neg_final() { return PathFunctional(Kind::exp_neg_final); }
  /// 1 / (1 + sum_{k=0}^{n} e^{-S_k}).
  static PathFunctional inv_one_plus_exp_sum() { return PathFunctional(Kind::inv_one_plus_exp_sum); }
  static PathFunctional custom(std::function<double(std::span<const double>)> fn);
  /// Registered tags: one, exp_neg_final, inv_one_plus_exp_sum. DomainError otherwise.
  static PathFunctional from_tag(std::string_view tag);

  Kind kind() const noexcept { return kind_; }
  double operator()(std::span<const double> sums) const;

 private:
  explicit PathFunctional(Kind k) : kind_(k) {}
  Kind kind_;
  std::function<double(std::span<const double>)> fn_;
};

struct WeightedEstimate {
  double estimate = 0.0;
  double se = 0.0;
  std::uint64_t reps = 0;
};

/// E_x^+[O_n] = E[O_n(x+S) U(x+S_n); L_n >= -x] / U(x), with U from the table.
WeightedEstimate plus_measure_expectation(const IncrementLaw& law, const PathFunctional& functional,
                                          std::size_t n, double x, std::uint64_t reps,
                                          const RenewalTable& table_U, StreamKey key,
                                          unsigned workers = 1);

/// Conditioning events for the rejection estimator.
struct WalkCondition {
  enum class Kind { min_at_least, max_below, tau_equals };
  Kind kind;
  double x = 0.0;       // L_n >= -x or M_n < -x, x >= 0
  std::size_t r = 0;    // tau(n) = r

  static WalkCondition min_at_least(double x) { return {Kind::min_at_least, x, 0}; }
  static WalkCondition max_below(double x) { return {Kind::max_below, x, 0}; }
  static WalkCondition tau_equals(std::size_t r) { return {Kind::tau_equals, 0.0, r}; }
  bool holds(std::span<const double> sums) const;
};

struct ConditionalEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double acceptance_rate = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t reps = 0;
};

/// Plain rejection estimate of E[O_n | condition]. Throws NoSampleError when
/// no path is accepted and DomainError for {tau(n) = r} under a lattice law.
ConditionalEstimate conditional_expectation(const IncrementLaw& law,
                                            const PathFunctional& functional,
                                            const WalkCondition& condition, std::size_t n,
                                            std::uint64_t reps, StreamKey key,
                                            unsigned workers = 1);

struct TiltedMeasureSpec {
  double lambda = 0.0;
  double c1 = 0.0;  // 1 / int_0^inf e^{-lambda z} U(z) dz
  double c2 = 0.0;  // 1 / int_{-inf}^0 e^{lambda z} V(z) dz
};

/// int_0^inf e^{-lambda y} T(y) dy for the table's piecewise-linear
/// interpolant in y = |x| with its linear tail, integrated in closed form.
double tilted_integral(const RenewalTable& table, double lambda);

TiltedMeasureSpec mu_nu_normalizers(const RenewalTable& table_U, const RenewalTable& table_V,
                                    double lambda);

/// CSV with columns x,value,stderr and header comments kind, cap, paths, seed.
void write_renewal_csv(const RenewalTable& table, const std::filesystem::path& file);
std::string renewal_csv(const RenewalTable& table);
RenewalTable read_renewal_csv(const std::filesystem::path& file);

}  // namespace bpire

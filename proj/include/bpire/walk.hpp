#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "bpire/env.hpp"

namespace bpire {

/// The associated random walk S_0 = 0, S_k = X_1 + ... + X_k.
class WalkPath {
 public:
  WalkPath() : sums_{0.0} {}
  /// Builds the path from its increments X_1..X_n.
  explicit WalkPath(std::vector<double> increments);
  /// Builds the path from partial sums; sums[0] must be 0.
  static WalkPath from_partial_sums(std::span<const double> sums);

  std::size_t n() const noexcept { return increments_.size(); }
  std::span<const double> increments() const noexcept { return increments_; }
  std::span<const double> partial_sums() const noexcept { return sums_; }
  double S(std::size_t k) const { return sums_[k]; }

  /// Refills the path in place from `law` (reuses storage).
  void resample(const IncrementLaw& law, std::size_t n, RngStream& stream);

 private:
  std::vector<double> increments_;
  std::vector<double> sums_;
};

struct PathSummary {
  std::vector<double> running_min;  // L_0..L_n, S_0 included
  std::vector<double> running_max;  // M_1..M_n, S_0 excluded
  std::size_t tau_n = 0;            // first index attaining L_n
};

struct LogExpFunctional {
  double log_a;  // S_i - S_n
  double log_b;  // log sum_{k=i}^{n-1} e^{S_i - S_k}
};

/// n i.i.d. increments from `law`; throws DomainError for n = 0.
WalkPath simulate_path(const IncrementLaw& law, std::size_t n, RngStream& stream);

PathSummary path_summary(const WalkPath& path);

/// First index in [0, m] attaining min(S_0..S_m).
std::size_t first_argmin(std::span<const double> sums, std::size_t m);
/// First index in [0, m] attaining max(S_0..S_m).
std::size_t first_argmax(std::span<const double> sums, std::size_t m);

/// log a_{i,n} and log b_{i,n}; throws DomainError unless 0 <= i <= n-1.
LogExpFunctional log_exp_functionals(const WalkPath& path, std::size_t i);

/// Debug dump: columns k,S_k.
void write_path_csv(const WalkPath& path, const std::filesystem::path& file);

}  // namespace bpire

#include "bpire/walk.hpp"

#include <cmath>
#include <string>

#include "bpire/errors.hpp"
#include "bpire/io.hpp"
#include "bpire/logsumexp.hpp"

namespace bpire {

WalkPath::WalkPath(std::vector<double> increments) : increments_(std::move(increments)) {
  sums_.resize(increments_.size() + 1);
  sums_[0] = 0.0;
  for (std::size_t k = 0; k < increments_.size(); ++k) sums_[k + 1] = sums_[k] + increments_[k];
}

WalkPath WalkPath::from_partial_sums(std::span<const double> sums) {
  if (sums.empty() || sums[0] != 0.0) {
    throw DomainError("from_partial_sums: sums must start with S_0 = 0");
  }
  WalkPath path;
  path.sums_.assign(sums.begin(), sums.end());
  path.increments_.resize(sums.size() - 1);
  for (std::size_t k = 1; k < sums.size(); ++k) path.increments_[k - 1] = sums[k] - sums[k - 1];
  return path;
}

void WalkPath::resample(const IncrementLaw& law, std::size_t n, RngStream& stream) {
  increments_.resize(n);
  sums_.resize(n + 1);
  sums_[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    increments_[k] = law.sample(stream);
    sums_[k + 1] = sums_[k] + increments_[k];
  }
}

WalkPath simulate_path(const IncrementLaw& law, std::size_t n, RngStream& stream) {
  if (n == 0) throw DomainError("simulate_path: n must be >= 1");
  WalkPath path;
  path.resample(law, n, stream);
  return path;
}

std::size_t first_argmin(std::span<const double> sums, std::size_t m) {
  std::size_t best = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (sums[k] < sums[best]) best = k;
  }
  return best;
}

std::size_t first_argmax(std::span<const double> sums, std::size_t m) {
  std::size_t best = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (sums[k] > sums[best]) best = k;
  }
  return best;
}

PathSummary path_summary(const WalkPath& path) {
  const auto s = path.partial_sums();
  const std::size_t n = path.n();
  PathSummary out;
  out.running_min.resize(n + 1);
  out.running_min[0] = s[0];
  for (std::size_t k = 1; k <= n; ++k) {
    out.running_min[k] = std::min(out.running_min[k - 1], s[k]);
    if (s[k] < s[out.tau_n]) out.tau_n = k;
  }
  out.running_max.resize(n);
  for (std::size_t k = 1; k <= n; ++k) {
    out.running_max[k - 1] = k == 1 ? s[1] : std::max(out.running_max[k - 2], s[k]);
  }
  return out;
}

LogExpFunctional log_exp_functionals(const WalkPath& path, std::size_t i) {
  const std::size_t n = path.n();
  if (n == 0 || i >= n) {
    throw DomainError("log_exp_functionals: i must lie in [0, n-1], got i=" + std::to_string(i) +
                      " n=" + std::to_string(n));
  }
  const auto s = path.partial_sums();
  LogSumExp b;
  for (std::size_t k = i; k < n; ++k) b.add(s[i] - s[k]);
  return {s[i] - s[n], b.value()};
}

void write_path_csv(const WalkPath& path, const std::filesystem::path& file) {
  std::string out = "k,S_k\n";
  const auto s = path.partial_sums();
  for (std::size_t k = 0; k < s.size(); ++k) out += std::to_string(k) + ',' + format_double(s[k]) + '\n';
  write_file_atomic(file, out);
}

}  // namespace bpire

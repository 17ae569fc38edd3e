#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "bpire/rng.hpp"
#include "bpire/walk.hpp"

namespace bpire {

/// Paths per batch. Every batch owns the stream key.child(batch index), so the
/// partition (and therefore every result) is independent of worker count.
inline constexpr std::uint64_t kBatchSize = std::uint64_t{1} << 14;

/// Count, mean and centered second moment; merged with Chan's update.
struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double n = na + nb;
    const double delta = o.mean - mean;
    mean += delta * nb / n;
    m2 += o.m2 + delta * delta * na * nb / n;
    count += o.count;
  }

  double variance() const noexcept {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
  double std_error() const noexcept {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t nsamples = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t batches = 0;
  bool budget_exceeded = false;

  double relative_se() const noexcept {
    return mean != 0.0 ? std_error / std::fabs(mean) : std::numeric_limits<double>::infinity();
  }
};

/// Either a fixed sample count, or a relative standard error goal with a
/// sample budget (budget exhaustion is flagged on the result).
struct SamplingTarget {
  std::uint64_t nsamples = 0;
  double rel_se = 0.0;
  std::uint64_t budget = 10'000'000;

  static SamplingTarget fixed(std::uint64_t n) { return {n, 0.0, n}; }
  static SamplingTarget relative(double goal, std::uint64_t budget = 10'000'000) {
    return {0, goal, budget};
  }
  bool adaptive() const noexcept { return nsamples == 0; }
};

/// Pairwise reduction over a fixed binary tree of the index range.
template <class Acc>
Acc tree_reduce(std::span<const Acc> items) {
  if (items.empty()) return Acc{};
  if (items.size() == 1) return items[0];
  const std::size_t mid = items.size() / 2;
  Acc left = tree_reduce(items.subspan(0, mid));
  left.merge(tree_reduce(items.subspan(mid)));
  return left;
}

/// Runs fn(batch_index) for batch indices [first, first + count) on up to
/// `workers` threads and returns the results in index order.
template <class Acc, class Fn>
std::vector<Acc> run_batches(std::uint64_t first, std::uint64_t count, unsigned workers, Fn&& fn) {
  std::vector<Acc> out(count);
  if (workers <= 1 || count <= 1) {
    for (std::uint64_t b = 0; b < count; ++b) out[b] = fn(first + b);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= count) return;
      try {
        out[b] = fn(first + b);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Number of samples in batch b of a run of `total` samples.
inline std::uint64_t batch_samples(std::uint64_t b, std::uint64_t total) noexcept {
  const std::uint64_t begin = b * kBatchSize;
  return begin >= total ? 0 : std::min(kBatchSize, total - begin);
}

/// Per-sample kernel: draws whatever it needs from the stream; the WalkPath is
/// per-batch scratch storage.
using SampleKernel = std::function<double(RngStream&, WalkPath&)>;

/// Mean of a per-sample kernel under the batch/stream/reduction contract.
/// Adaptive targets run deterministic rounds of whole batches until the
/// relative standard error reaches the goal or the budget is spent.
EstimatorResult estimate_mean(StreamKey key, const SamplingTarget& target, unsigned workers,
                              const SampleKernel& kernel);

/// Default worker count: BPIRE_WORKERS if set and valid, else 1.
unsigned default_workers();

}  // namespace bpire

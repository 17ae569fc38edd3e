#include "bpire/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "bpire/errors.hpp"

namespace bpire {

namespace {

constexpr std::uint64_t kFirstRoundBatches = 8;

std::vector<Moments> run_moment_batches(StreamKey key, std::uint64_t first, std::uint64_t count,
                                        std::uint64_t total, unsigned workers,
                                        const SampleKernel& kernel) {
  return run_batches<Moments>(first, count, workers, [&](std::uint64_t b) {
    RngStream rng(key.child(b));
    WalkPath scratch;
    Moments m;
    const std::uint64_t k = batch_samples(b, total);
    for (std::uint64_t s = 0; s < k; ++s) m.add(kernel(rng, scratch));
    return m;
  });
}

EstimatorResult to_result(const Moments& m, StreamKey key, std::uint64_t batches) {
  EstimatorResult r;
  r.mean = m.mean;
  r.std_error = m.std_error();
  r.nsamples = m.count;
  r.master_seed = key.master_seed();
  r.batches = batches;
  return r;
}

}  // namespace

EstimatorResult estimate_mean(StreamKey key, const SamplingTarget& target, unsigned workers,
                              const SampleKernel& kernel) {
  if (!target.adaptive()) {
    const std::uint64_t total = target.nsamples;
    const std::uint64_t nb = (total + kBatchSize - 1) / kBatchSize;
    auto parts = run_moment_batches(key, 0, nb, total, workers, kernel);
    return to_result(tree_reduce<Moments>(parts), key, nb);
  }
  if (!(target.rel_se > 0.0)) throw DomainError("estimate_mean: relative se goal must be > 0");
  if (target.budget == 0) throw DomainError("estimate_mean: sample budget must be > 0");

  // Batches are always full in adaptive mode; the budget is rounded up to whole batches.
  const std::uint64_t budget_batches = (target.budget + kBatchSize - 1) / kBatchSize;
  const std::uint64_t unbounded = std::numeric_limits<std::uint64_t>::max();
  std::vector<Moments> parts;
  std::uint64_t next = std::min(kFirstRoundBatches, budget_batches);
  for (;;) {
    const std::uint64_t done = parts.size();
    auto more = run_moment_batches(key, done, next, unbounded, workers, kernel);
    parts.insert(parts.end(), more.begin(), more.end());
    const Moments total = tree_reduce<Moments>(parts);
    EstimatorResult r = to_result(total, key, parts.size());
    const double rel = r.relative_se();
    if (rel <= target.rel_se) return r;
    if (parts.size() >= budget_batches) {
      r.budget_exceeded = true;
      return r;
    }
    const double have = static_cast<double>(parts.size());
    double want = std::isfinite(rel) ? have * (rel / target.rel_se) * (rel / target.rel_se) * 1.1
                                     : 2.0 * have;
    want = std::max(want, have + 1.0);
    const auto want_batches = static_cast<std::uint64_t>(std::ceil(std::min(want, 1e15)));
    next = std::min(want_batches, budget_batches) - parts.size();
  }
}

unsigned default_workers() {
  if (const char* env = std::getenv("BPIRE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace bpire

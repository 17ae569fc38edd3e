#include "bpire/popsim.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "bpire/env.hpp"
#include "bpire/errors.hpp"

namespace bpire {

std::uint64_t ClanVector::total() const noexcept {
  return std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
}

std::uint64_t sample_clan_offspring(std::uint64_t parents, double x, RngStream& stream) {
  if (parents == 0) return 0;
  const OffspringParams op = offspring_params(x);
  if (parents == 1) {
    // Inversion: P(J >= j) = p^j.
    const double u = 1.0 - stream.uniform01();  // (0, 1]
    const double j = std::floor(std::log(u) / op.log_p);
    if (!(j < static_cast<double>(kClanSizeCap))) {
      throw PopulationOverflowError("clan size exceeds 2^62 cap");
    }
    return static_cast<std::uint64_t>(j);
  }
  // Gamma-Poisson mixture with shape = parents and scale p/q = e^x.
  const double g = boost::random::gamma_distribution<double>(static_cast<double>(parents), 1.0)(stream);
  const double lambda = g * std::exp(x);
  if (!(lambda < 0x1.0p61)) throw PopulationOverflowError("clan size exceeds 2^62 cap");
  if (lambda <= 0.0) return 0;
  const auto draw = boost::random::poisson_distribution<std::int64_t, double>(lambda)(stream);
  if (draw < 0 || static_cast<std::uint64_t>(draw) >= kClanSizeCap) {
    throw PopulationOverflowError("clan size exceeds 2^62 cap");
  }
  return static_cast<std::uint64_t>(draw);
}

void step_generation_inplace(ClanVector& clans, double x, RngStream& stream) {
  for (auto& z : clans.sizes) z = sample_clan_offspring(z, x, stream);
  clans.sizes.push_back(1);
  ++clans.generation;
}

ClanVector step_generation(const ClanVector& clans, double x, RngStream& stream) {
  ClanVector next = clans;
  step_generation_inplace(next, x, stream);
  return next;
}

ClanVector simulate_population(const WalkPath& path, RngStream& stream) {
  ClanVector clans;
  clans.sizes.reserve(path.n() + 1);
  for (double x : path.increments()) step_generation_inplace(clans, x, stream);
  return clans;
}

bool event_indicator(const ClanVector& clans, std::size_t i, Convention convention) {
  const auto view = clans.pre_immigration_view();
  if (i >= view.size()) {
    throw DomainError("event_indicator: i must lie in [0, n-1], got i=" + std::to_string(i) +
                      " n=" + std::to_string(view.size()));
  }
  if (view[i] == 0) return false;
  const std::size_t first = (convention == Convention::paper_corollary && i >= 1) ? 1 : 0;
  for (std::size_t k = first; k < view.size(); ++k) {
    if (k != i && view[k] != 0) return false;
  }
  return true;
}

namespace {

EventFrequency to_frequency(std::uint64_t hits, std::uint64_t reps) {
  EventFrequency f;
  f.reps = reps;
  f.freq = reps ? static_cast<double>(hits) / static_cast<double>(reps) : 0.0;
  f.se = reps ? std::sqrt(f.freq * (1.0 - f.freq) / static_cast<double>(reps)) : 0.0;
  return f;
}

struct HitCount {
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  void merge(const HitCount& o) noexcept {
    hits += o.hits;
    reps += o.reps;
  }
};

struct ProfileCount {
  std::vector<std::uint64_t> strict;
  std::vector<std::uint64_t> paper;
  std::uint64_t none = 0;
  std::uint64_t multi = 0;
  std::uint64_t reps = 0;
  void merge(const ProfileCount& o) {
    if (strict.empty()) {
      *this = o;
      return;
    }
    for (std::size_t k = 0; k < strict.size() && k < o.strict.size(); ++k) {
      strict[k] += o.strict[k];
      paper[k] += o.paper[k];
    }
    none += o.none;
    multi += o.multi;
    reps += o.reps;
  }
};

}  // namespace

EventFrequency oracle_event_frequency(const WalkPath& path, std::size_t i, Convention convention,
                                      std::uint64_t reps, StreamKey key, unsigned workers) {
  if (reps == 0) throw DomainError("oracle_event_frequency: reps must be >= 1");
  if (i >= path.n()) throw DomainError("oracle_event_frequency: i must lie in [0, n-1]");
  const std::uint64_t nb = (reps + kBatchSize - 1) / kBatchSize;
  auto parts = run_batches<HitCount>(0, nb, workers, [&](std::uint64_t b) {
    RngStream rng(key.child(b));
    HitCount c;
    const std::uint64_t k = batch_samples(b, reps);
    for (std::uint64_t r = 0; r < k; ++r) {
      const ClanVector clans = simulate_population(path, rng);
      c.hits += event_indicator(clans, i, convention) ? 1 : 0;
      ++c.reps;
    }
    return c;
  });
  const HitCount total = tree_reduce<HitCount>(parts);
  return to_frequency(total.hits, total.reps);
}

OracleProfile oracle_profile(const WalkPath& path, std::uint64_t reps, StreamKey key,
                             unsigned workers) {
  if (reps == 0) throw DomainError("oracle_profile: reps must be >= 1");
  const std::size_t n = path.n();
  if (n == 0) throw DomainError("oracle_profile: empty path");
  const std::uint64_t nb = (reps + kBatchSize - 1) / kBatchSize;
  auto parts = run_batches<ProfileCount>(0, nb, workers, [&](std::uint64_t b) {
    RngStream rng(key.child(b));
    ProfileCount c;
    c.strict.assign(n, 0);
    c.paper.assign(n, 0);
    const std::uint64_t k = batch_samples(b, reps);
    for (std::uint64_t r = 0; r < k; ++r) {
      const ClanVector clans = simulate_population(path, rng);
      const auto view = clans.pre_immigration_view();
      std::size_t alive = 0;
      std::size_t alive_from1 = 0;
      std::size_t last = 0;
      std::size_t last_from1 = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (view[j] == 0) continue;
        ++alive;
        last = j;
        if (j >= 1) {
          ++alive_from1;
          last_from1 = j;
        }
      }
      if (alive == 0) ++c.none;
      if (alive >= 2) ++c.multi;
      if (alive == 1) ++c.strict[last];
      // paper convention: i = 0 needs all others dead; i >= 1 ignores clan 0.
      if (alive == 1 && last == 0) ++c.paper[0];
      if (alive_from1 == 1) ++c.paper[last_from1];
      ++c.reps;
    }
    return c;
  });
  const ProfileCount total = tree_reduce<ProfileCount>(parts);
  OracleProfile out;
  for (std::size_t j = 0; j < n; ++j) {
    out.strict.push_back(to_frequency(total.strict[j], total.reps));
    out.paper.push_back(to_frequency(total.paper[j], total.reps));
  }
  out.none = to_frequency(total.none, total.reps);
  out.multi = to_frequency(total.multi, total.reps);
  return out;
}

}  // namespace bpire

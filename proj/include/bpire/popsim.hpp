#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bpire/engine.hpp"
#include "bpire/gfalgebra.hpp"
#include "bpire/walk.hpp"

namespace bpire {

/// Largest clan size the simulator represents; exceeding it raises
/// PopulationOverflowError for the replicate.
inline constexpr std::uint64_t kClanSizeCap = std::uint64_t{1} << 62;

/// sizes[k] = descendants alive at `generation` of the immigrant that entered
/// at generation k (k = 0 is the founder). After a step the last entry is the
/// immigrant that just arrived and has size 1.
struct ClanVector {
  std::size_t generation = 0;
  std::vector<std::uint64_t> sizes{1};

  /// Clans 0..generation-1, i.e. Y_g^- (the fresh immigrant excluded).
  std::span<const std::uint64_t> pre_immigration_view() const noexcept {
    return std::span<const std::uint64_t>(sizes).first(generation);
  }
  std::uint64_t total() const noexcept;
};

/// Total offspring of `parents` i.i.d. Geometric(q) individuals on {0,1,...}
/// with P(j) = q p^j and p/q = e^x (negative binomial; one variate per clan).
std::uint64_t sample_clan_offspring(std::uint64_t parents, double x, RngStream& stream);

/// Offspring step in environment x followed by one immigrant.
ClanVector step_generation(const ClanVector& clans, double x, RngStream& stream);
void step_generation_inplace(ClanVector& clans, double x, RngStream& stream);

/// Y_0 = 1 founder, then one step per increment of the path.
ClanVector simulate_population(const WalkPath& path, RngStream& stream);

/// Event "only clan i survives" on the pre-immigration view at generation n.
/// Throws DomainError unless 0 <= i <= n-1.
bool event_indicator(const ClanVector& clans, std::size_t i, Convention convention);

struct EventFrequency {
  double freq = 0.0;
  double se = 0.0;
  std::uint64_t reps = 0;
};

/// Fraction of `reps` independent population runs in the frozen environment
/// `path` on which event_indicator(i, convention) holds.
EventFrequency oracle_event_frequency(const WalkPath& path, std::size_t i, Convention convention,
                                      std::uint64_t reps, StreamKey key, unsigned workers = 1);

/// Per-environment frequencies from one set of runs: for every i the event
/// frequency under both conventions, plus the frequency that no clan and
/// that two or more clans of 0..n-1 survive.
struct OracleProfile {
  std::vector<EventFrequency> strict;
  std::vector<EventFrequency> paper;
  EventFrequency none;
  EventFrequency multi;
};

OracleProfile oracle_profile(const WalkPath& path, std::uint64_t reps, StreamKey key,
                             unsigned workers = 1);

}  // namespace bpire

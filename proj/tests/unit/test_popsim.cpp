#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bpire/errors.hpp"
#include "bpire/popsim.hpp"
#include "oracles.hpp"

using namespace bpire;

namespace {

ClanVector view_of(std::vector<std::uint64_t> pre) {
  ClanVector c;
  c.generation = pre.size();
  c.sizes = std::move(pre);
  c.sizes.push_back(1);
  return c;
}

}  // namespace

TEST(SampleClanOffspring, ZeroIsAbsorbing) {
  RngStream r(1, 1);
  for (int k = 0; k < 100; ++k) ASSERT_EQ(sample_clan_offspring(0, 3.0, r), 0u);
}

TEST(SampleClanOffspring, CriticalGeometricMean) {
  RngStream r(2, 1);
  const int n = 1000000;
  double sum = 0, sq = 0;
  int zeros = 0;
  for (int k = 0; k < n; ++k) {
    const double v = static_cast<double>(sample_clan_offspring(1, 0.0, r));
    sum += v;
    sq += v * v;
    zeros += v == 0;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.006);
  EXPECT_NEAR(sq / n - 1.0, 2.0, 0.05);  // Var = p/q^2 = 2
  EXPECT_NEAR(zeros / double(n), 0.5, 4 * 0.0005);
}

TEST(SampleClanOffspring, NegativeBinomialMoments) {
  // Sum of m geometrics with p/q = e^x: mean m e^x, variance m e^x (1 + e^x).
  RngStream r(3, 1);
  for (std::uint64_t m : {5ull, 40ull, 1000ull}) {
    for (double x : {-0.7, 0.4}) {
      const int n = 200000;
      double sum = 0, sq = 0;
      for (int k = 0; k < n; ++k) {
        const double v = static_cast<double>(sample_clan_offspring(m, x, r));
        sum += v;
        sq += v * v;
      }
      const double mean = m * std::exp(x);
      const double var = mean * (1 + std::exp(x));
      EXPECT_NEAR(sum / n, mean, 5 * std::sqrt(var / n)) << m << ' ' << x;
      EXPECT_NEAR((sq / n - (sum / n) * (sum / n)) / var, 1.0, 0.03) << m << ' ' << x;
    }
  }
}

TEST(SampleClanOffspring, OverflowIsReported) {
  RngStream r(4, 1);
  EXPECT_THROW(sample_clan_offspring(std::uint64_t{1} << 61, 2.0, r), PopulationOverflowError);
}

TEST(StepGeneration, AppendsImmigrantOfSizeOne) {
  RngStream r(5, 1);
  ClanVector c;
  for (std::size_t g = 1; g <= 10; ++g) {
    c = step_generation(c, 0.3, r);
    ASSERT_EQ(c.generation, g);
    ASSERT_EQ(c.sizes.size(), g + 1);
    ASSERT_EQ(c.sizes.back(), 1u);
    ASSERT_EQ(c.pre_immigration_view().size(), g);
  }
}

TEST(StepGeneration, InplaceMatchesCopy) {
  RngStream a(6, 1), b(6, 1);
  ClanVector c1, c2;
  for (int g = 0; g < 20; ++g) {
    c1 = step_generation(c1, 0.5, a);
    step_generation_inplace(c2, 0.5, b);
  }
  EXPECT_EQ(c1.sizes, c2.sizes);
}

TEST(SimulatePopulation, HostileEnvironmentKillsOldClans) {
  const WalkPath path(std::vector<double>(5, -30.0));
  RngStream r(7, 1);
  int bad = 0;
  for (int rep = 0; rep < 100000; ++rep) {
    const auto c = simulate_population(path, r);
    ASSERT_EQ(c.pre_immigration_view().size(), 5u);
    for (std::size_t k = 0; k + 1 < 5; ++k) bad += c.sizes[k] != 0;
  }
  EXPECT_EQ(bad, 0);
}

TEST(SimulatePopulation, Conservation) {
  RngStream r(8, 1);
  const auto path = simulate_path(IncrementLaw::gaussian(1.0), 12, r);
  const auto c = simulate_population(path, r);
  std::uint64_t pre = 0;
  for (auto v : c.pre_immigration_view()) pre += v;
  EXPECT_EQ(c.total(), pre + 1);
}

TEST(EventIndicator, Conventions) {
  const auto only = view_of({0, 0, 3, 0});
  EXPECT_TRUE(event_indicator(only, 2, Convention::strict));
  EXPECT_TRUE(event_indicator(only, 2, Convention::paper_corollary));
  const auto founder_alive = view_of({2, 0, 3, 0});
  EXPECT_FALSE(event_indicator(founder_alive, 2, Convention::strict));
  EXPECT_TRUE(event_indicator(founder_alive, 2, Convention::paper_corollary));
  const auto dead = view_of({0, 0, 0, 0});
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_FALSE(event_indicator(dead, i, Convention::strict));
    EXPECT_FALSE(event_indicator(dead, i, Convention::paper_corollary));
  }
  EXPECT_THROW(event_indicator(dead, 4, Convention::strict), DomainError);
}

TEST(OracleFrequency, SingleGeneration) {
  const WalkPath path(std::vector<double>{0.0});
  const auto f = oracle_event_frequency(path, 0, Convention::paper_corollary, 1000000, StreamKey::root(1));
  EXPECT_NEAR(f.freq, 0.5, 4 * 0.0005);
  EXPECT_NEAR(f.freq, clan_prob(path, 0).value(), 4 * f.se);
}

TEST(OracleFrequency, ConstantEnvironmentStrict) {
  const WalkPath path(std::vector<double>(4, 0.0));
  const auto f = oracle_event_frequency(path, 2, Convention::strict, 1000000, StreamKey::root(2));
  EXPECT_NEAR(f.freq, 0.1, 4 * f.se);
}

TEST(OracleFrequency, SingleReplicate) {
  const WalkPath path(std::vector<double>(3, 0.1));
  const auto f = oracle_event_frequency(path, 1, Convention::strict, 1, StreamKey::root(3));
  EXPECT_TRUE(f.freq == 0.0 || f.freq == 1.0);
  EXPECT_EQ(f.se, 0.0);
  EXPECT_EQ(f.reps, 1u);
}

TEST(OracleFrequency, DeterministicAcrossWorkers) {
  const WalkPath path(oracle::gaussian_increments(6, 5));
  const auto a = oracle_event_frequency(path, 3, Convention::strict, 100000, StreamKey::root(4), 1);
  const auto b = oracle_event_frequency(path, 3, Convention::strict, 100000, StreamKey::root(4), 4);
  EXPECT_EQ(a.freq, b.freq);
}

TEST(OracleProfile, AgreesWithExactProbabilities) {
  const auto x = oracle::gaussian_increments(6, 21);
  const WalkPath path(x);
  const auto prof = oracle_profile(path, 400000, StreamKey::root(5), 2);
  ASSERT_EQ(prof.strict.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    const double s = static_cast<double>(oracle::clan_event_prob(x, i, true));
    const double p = static_cast<double>(oracle::clan_event_prob(x, i, false));
    EXPECT_NEAR(prof.strict[i].freq, s, 4.5 * std::sqrt(s * (1 - s) / 400000)) << i;
    EXPECT_NEAR(prof.paper[i].freq, p, 4.5 * std::sqrt(p * (1 - p) / 400000)) << i;
  }
  const double none = static_cast<double>(oracle::no_survivor_prob(x));
  EXPECT_NEAR(prof.none.freq, none, 4.5 * std::sqrt(none * (1 - none) / 400000));
  double total = prof.none.freq + prof.multi.freq;
  for (const auto& f : prof.strict) total += f.freq;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

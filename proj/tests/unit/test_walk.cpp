#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bpire/errors.hpp"
#include "bpire/io.hpp"
#include "bpire/walk.hpp"
#include "oracles.hpp"

using namespace bpire;

TEST(SimulatePath, ZeroLengthRejected) {
  RngStream r(1, 1);
  EXPECT_THROW(simulate_path(IncrementLaw::gaussian(1), 0, r), DomainError);
}

TEST(SimulatePath, LatticeParity) {
  RngStream r(1, 1);
  for (int rep = 0; rep < 200; ++rep) {
    const auto path = simulate_path(IncrementLaw::two_point_lattice(1.0), 3, r);
    const auto s = path.partial_sums();
    ASSERT_EQ(s[0], 0.0);
    for (std::size_t k = 0; k <= 3; ++k) {
      ASSERT_LE(std::fabs(s[k]), static_cast<double>(k));
      ASSERT_EQ(static_cast<long>(std::fabs(s[k])) % 2, static_cast<long>(k % 2));
    }
  }
}

TEST(SimulatePath, Reproducible) {
  RngStream a(8, 8), b(8, 8);
  const auto p = simulate_path(IncrementLaw::laplace(0.3), 1, a);
  const auto q = simulate_path(IncrementLaw::laplace(0.3), 1, b);
  EXPECT_EQ(p.S(1), q.S(1));
}

TEST(SimulatePath, VarianceGrowsLinearly) {
  RngStream r(10, 0);
  const std::size_t n = 10000;
  double sq = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto p = simulate_path(IncrementLaw::gaussian(1), n, r);
    sq += p.S(n) * p.S(n);
  }
  const double ratio = sq / 1000 / n;
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}

TEST(WalkPath, ResampleMatchesSimulate) {
  RngStream a(4, 4), b(4, 4);
  WalkPath reused;
  reused.resample(IncrementLaw::gaussian(1), 50, a);
  const auto fresh = simulate_path(IncrementLaw::gaussian(1), 50, b);
  for (std::size_t k = 0; k <= 50; ++k) EXPECT_EQ(reused.S(k), fresh.S(k));
  reused.resample(IncrementLaw::gaussian(1), 5, a);
  EXPECT_EQ(reused.n(), 5u);
  EXPECT_EQ(reused.partial_sums().size(), 6u);
}

TEST(WalkPath, FromPartialSums) {
  const std::vector<double> s{0.0, 0.5, -0.2, 0.3};
  const auto p = WalkPath::from_partial_sums(s);
  EXPECT_EQ(p.n(), 3u);
  EXPECT_NEAR(p.increments()[1], -0.7, 1e-15);
  const std::vector<double> bad{1.0, 2.0};
  EXPECT_THROW(WalkPath::from_partial_sums(bad), DomainError);
}

TEST(PathSummary, DirectInspection) {
  const std::vector<double> s{0.0, 0.5, -0.2, 0.3};
  const auto sum = path_summary(WalkPath::from_partial_sums(s));
  EXPECT_EQ(sum.running_min.back(), -0.2);
  EXPECT_EQ(sum.running_max.back(), 0.5);
  EXPECT_EQ(sum.tau_n, 2u);
  EXPECT_EQ(sum.running_min.size(), 4u);
  EXPECT_EQ(sum.running_max.size(), 3u);
}

TEST(PathSummary, FirstMinimumOnTies) {
  const std::vector<double> s{0.0, -1.0, 0.0};
  EXPECT_EQ(path_summary(WalkPath::from_partial_sums(s)).tau_n, 1u);
  const std::vector<double> t{0.0, -1.0, -1.0};
  EXPECT_EQ(path_summary(WalkPath::from_partial_sums(t)).tau_n, 1u);
}

TEST(PathSummary, PositivePathHasTauZero) {
  const std::vector<double> s{0.0, 0.1, 0.4, 0.2};
  const auto sum = path_summary(WalkPath::from_partial_sums(s));
  EXPECT_EQ(sum.tau_n, 0u);
  EXPECT_EQ(sum.running_min.back(), 0.0);
}

TEST(PathSummary, InvariantsOnRandomPaths) {
  RngStream r(77, 0);
  for (int rep = 0; rep < 500; ++rep) {
    const auto p = simulate_path(IncrementLaw::gaussian(1), 1 + rep % 40, r);
    const auto sum = path_summary(p);
    for (std::size_t k = 1; k < sum.running_min.size(); ++k) {
      ASSERT_LE(sum.running_min[k], sum.running_min[k - 1]);
    }
    for (std::size_t k = 1; k < sum.running_max.size(); ++k) {
      ASSERT_GE(sum.running_max[k], sum.running_max[k - 1]);
    }
    ASSERT_EQ(p.S(sum.tau_n), sum.running_min.back());
    for (std::size_t k = 0; k < sum.tau_n; ++k) ASSERT_GT(p.S(k), sum.running_min.back());
    ASSERT_EQ(sum.tau_n == 0, sum.running_min.back() == 0.0);
  }
}

TEST(LogExpFunctionals, ZeroPath) {
  const auto p = WalkPath(std::vector<double>(4, 0.0));
  const auto f = log_exp_functionals(p, 0);
  EXPECT_EQ(std::exp(f.log_a), 1.0);
  EXPECT_NEAR(std::exp(f.log_b), 4.0, 1e-15);
}

TEST(LogExpFunctionals, SingleStep) {
  const auto p = WalkPath(std::vector<double>{-1.0});
  const auto f = log_exp_functionals(p, 0);
  EXPECT_NEAR(std::exp(f.log_a), std::exp(1.0), 1e-15);
  EXPECT_EQ(f.log_b, 0.0);
}

TEST(LogExpFunctionals, IndexOutOfRange) {
  const auto p = WalkPath(std::vector<double>{0.1, 0.2});
  EXPECT_THROW(log_exp_functionals(p, 2), DomainError);
}

TEST(LogExpFunctionals, MatchesNaiveSum) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = oracle::gaussian_increments(20, seed);
    const auto s = oracle::partial_sums(x);
    double naive = 0;
    for (std::size_t k = 0; k < 20; ++k) naive += std::exp(-s[k]);
    const auto f = log_exp_functionals(WalkPath(x), 0);
    EXPECT_NEAR(std::exp(f.log_b) / naive, 1.0, 1e-12);
    EXPECT_NEAR(f.log_a, -s[20], 1e-12);
  }
}

TEST(LogExpFunctionals, LargeExcursionsStayFinite) {
  std::vector<double> x(12, 50.0);
  for (std::size_t k = 6; k < 12; ++k) x[k] = -100.0;
  const WalkPath p(x);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto f = log_exp_functionals(p, i);
    ASSERT_TRUE(std::isfinite(f.log_a));
    ASSERT_TRUE(std::isfinite(f.log_b));
    ASSERT_GE(f.log_b, 0.0);
  }
}

TEST(LogExpFunctionals, TelescopingProperty) {
  RngStream r(12, 0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rep % 60;
    const auto p = simulate_path(IncrementLaw::gaussian(2.0), n, r);
    const auto whole = log_exp_functionals(p, 0);
    for (std::size_t m = 1; m < n; ++m) {
      const auto head = log_exp_functionals(WalkPath::from_partial_sums(p.partial_sums().subspan(0, m + 1)), 0);
      const auto tail = log_exp_functionals(p, m);
      const double rhs = std::log(std::exp(head.log_b) + std::exp(head.log_a + tail.log_b));
      ASSERT_NEAR(whole.log_b, rhs, 1e-10 * std::max(1.0, std::fabs(rhs)));
    }
  }
}

TEST(FirstArgExtrema, Basics) {
  const std::vector<double> s{0.0, 2.0, -1.0, 2.0, -1.0};
  EXPECT_EQ(first_argmin(s, 4), 2u);
  EXPECT_EQ(first_argmax(s, 4), 1u);
  EXPECT_EQ(first_argmin(s, 1), 0u);
}

TEST(WritePathCsv, Format) {
  const auto dir = std::filesystem::temp_directory_path() / "bpire_walk_csv";
  const auto p = WalkPath(std::vector<double>{0.5, -1.0});
  write_path_csv(p, dir / "path.csv");
  EXPECT_EQ(read_file(dir / "path.csv"), "k,S_k\n0,0\n1,0.5\n2,-0.5\n");
  std::filesystem::remove_all(dir);
}

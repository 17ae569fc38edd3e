#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "bpire/conditioned.hpp"
#include "bpire/errors.hpp"
#include "oracles.hpp"

using namespace bpire;

namespace {

const IncrementLaw kGauss = IncrementLaw::gaussian(1.0);

std::vector<double> u_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 20; ++k) g.push_back(0.25 * k);
  return g;
}

const RenewalTable& shared_U() {
  static const RenewalTable t = estimate_U(kGauss, u_grid(), 200000, 100000, StreamKey::root(31));
  return t;
}

const RenewalTable& shared_V() {
  static const RenewalTable t = [] {
    std::vector<double> g;
    for (double x : u_grid()) g.push_back(-x);
    return estimate_V(kGauss, g, 200000, 100000, StreamKey::root(32));
  }();
  return t;
}

}  // namespace

TEST(RenewalU, ValueAtZeroIsExactlyOne) {
  const auto& t = shared_U();
  EXPECT_EQ(t(0.0), 1.0);
  EXPECT_EQ(t.stderr_at(0.0), 0.0);
  EXPECT_EQ(t.grid.front(), 0.0);
}

TEST(RenewalU, MonotoneOnCommonPaths) {
  const auto& t = shared_U();
  for (std::size_t k = 1; k < t.values.size(); ++k) ASSERT_LE(t.values[k - 1], t.values[k]);
}

TEST(RenewalU, GridNormalisation) {
  const auto t = estimate_U(kGauss, {2.0, 0.5}, 1000, 1000, StreamKey::root(1));
  ASSERT_EQ(t.grid.size(), 3u);
  EXPECT_EQ(t.grid[0], 0.0);
  EXPECT_EQ(t.grid[1], 0.5);
  EXPECT_EQ(t.grid[2], 2.0);
}

TEST(RenewalU, Errors) {
  EXPECT_THROW(estimate_U(kGauss, {}, 10, 10, StreamKey::root(1)), DomainError);
  EXPECT_THROW(estimate_U(kGauss, {-1.0}, 10, 10, StreamKey::root(1)), DomainError);
  EXPECT_THROW(estimate_U(kGauss, {1.0}, 10, 0, StreamKey::root(1)), DomainError);
  EXPECT_THROW(estimate_V(kGauss, {1.0}, 10, 10, StreamKey::root(1)), DomainError);
  EXPECT_THROW(shared_U()(-0.5), DomainError);
  EXPECT_THROW(shared_V()(0.5), DomainError);
}

TEST(RenewalU, CapDoublingStability) {
  const auto a = estimate_U(kGauss, {1.0}, 100000, 1000000, StreamKey::root(40));
  const auto b = estimate_U(kGauss, {1.0}, 100000, 2000000, StreamKey::root(40));
  EXPECT_LT(a.truncated_fraction, 0.01);
  EXPECT_TRUE(std::isfinite(a(1.0)));
  EXPECT_LE(std::fabs(a(1.0) - b(1.0)), 2 * a.stderr_at(1.0));
}

TEST(RenewalU, DeterministicAcrossWorkers) {
  const auto a = estimate_U(kGauss, {0.5, 1.0}, 50000, 10000, StreamKey::root(41), 1);
  const auto b = estimate_U(kGauss, {0.5, 1.0}, 50000, 10000, StreamKey::root(41), 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.stderr_values, b.stderr_values);
}

TEST(RenewalV, ZeroAndMonotone) {
  const auto& t = shared_V();
  EXPECT_EQ(t(0.0), 1.0);
  for (std::size_t k = 1; k < t.values.size(); ++k) ASSERT_LE(t.values[k - 1], t.values[k]);
  EXPECT_LE(t.grid.back(), 0.0);
}

TEST(RenewalV, CapDoublingStability) {
  const auto a = estimate_V(kGauss, {-2.0}, 100000, 1000000, StreamKey::root(42));
  const auto b = estimate_V(kGauss, {-2.0}, 100000, 2000000, StreamKey::root(42));
  EXPECT_LE(std::fabs(a(-2.0) - b(-2.0)), 2 * a.stderr_at(-2.0));
}

TEST(RenewalTable, InterpolationAndExtrapolation) {
  RenewalTable t;
  t.kind = RenewalTable::Kind::U;
  t.grid = {0.0, 1.0, 2.0};
  t.values = {1.0, 2.0, 4.0};
  t.stderr_values = {0.0, 0.1, 0.2};
  EXPECT_DOUBLE_EQ(t(0.5), 1.5);
  EXPECT_DOUBLE_EQ(t(1.5), 3.0);
  EXPECT_DOUBLE_EQ(t(3.0), 6.0);
  EXPECT_DOUBLE_EQ(t.stderr_at(0.5), 0.05);
}

TEST(Harmonicity, ExactIdentityAtZero) {
  const auto u = harmonicity_residual(kGauss, shared_U(), 0.0, 400000, StreamKey::root(50));
  EXPECT_LE(std::fabs(u.residual), 3 * std::hypot(u.se, u.table_se) + 1e-15);
  const auto v = harmonicity_residual(kGauss, shared_V(), 0.0, 400000, StreamKey::root(51));
  EXPECT_LE(std::fabs(v.residual), 3 * std::hypot(v.se, v.table_se) + 1e-15);
}

TEST(Harmonicity, InteriorPoints) {
  std::uint64_t id = 60;
  for (double x : {0.5, 1.0, 2.0}) {
    const auto u = harmonicity_residual(kGauss, shared_U(), x, 200000, StreamKey::root(id++));
    EXPECT_LE(std::fabs(u.residual), 4 * std::hypot(u.se, u.table_se)) << x;
    const auto v = harmonicity_residual(kGauss, shared_V(), -x, 200000, StreamKey::root(id++));
    EXPECT_LE(std::fabs(v.residual), 4 * std::hypot(v.se, v.table_se)) << -x;
  }
}

TEST(Harmonicity, Errors) {
  EXPECT_THROW(harmonicity_residual(kGauss, shared_U(), 1.0, 0, StreamKey::root(1)), DomainError);
  EXPECT_THROW(harmonicity_residual(kGauss, shared_U(), -1.0, 10, StreamKey::root(1)), DomainError);
  EXPECT_THROW(harmonicity_residual(kGauss, shared_V(), 1.0, 10, StreamKey::root(1)), DomainError);
}

TEST(PathFunctional, Values) {
  const std::vector<double> s{0.0, 1.0, -0.5};
  EXPECT_EQ(PathFunctional::one()(s), 1.0);
  EXPECT_NEAR(PathFunctional::exp_neg_final()(s), std::exp(0.5), 1e-15);
  const double sum = 1 + std::exp(0.0) + std::exp(-1.0) + std::exp(0.5);
  EXPECT_NEAR(PathFunctional::inv_one_plus_exp_sum()(s), 1 / sum, 1e-15);
  EXPECT_EQ(PathFunctional::from_tag("one").kind(), PathFunctional::Kind::one);
  EXPECT_THROW(PathFunctional::from_tag("nope"), DomainError);
  const auto f = PathFunctional::custom([](std::span<const double> v) { return v.size() * 1.0; });
  EXPECT_EQ(f(s), 3.0);
}

TEST(PlusMeasure, ConstantFunctionalIsHarmonicity) {
  for (double x : {0.0, 1.0}) {
    const auto e = plus_measure_expectation(kGauss, PathFunctional::one(), 5, x, 400000, shared_U(),
                                            StreamKey::root(70));
    // The table error enters through U(x + S_n); allow for it with the table se at the end point scale.
    const double tol = 3 * std::hypot(e.se, shared_U().stderr_at(2.0) / shared_U()(x));
    EXPECT_NEAR(e.estimate, 1.0, tol) << x;
  }
}

TEST(PlusMeasure, EmptyPath) {
  const auto e = plus_measure_expectation(kGauss, PathFunctional::exp_neg_final(), 0, 1.0, 100,
                                          shared_U(), StreamKey::root(71));
  EXPECT_NEAR(e.estimate, std::exp(-1.0), 1e-15);
  EXPECT_EQ(e.se, 0.0);
}

TEST(PlusMeasure, LimitFunctionalConverges) {
  const auto a = plus_measure_expectation(kGauss, PathFunctional::inv_one_plus_exp_sum(), 128, 0.0,
                                          200000, shared_U(), StreamKey::root(72));
  const auto b = plus_measure_expectation(kGauss, PathFunctional::inv_one_plus_exp_sum(), 256, 0.0,
                                          200000, shared_U(), StreamKey::root(73));
  EXPECT_LT(std::fabs(a.estimate - b.estimate), 3 * std::hypot(a.se, b.se));
}

TEST(PlusMeasure, Errors) {
  EXPECT_THROW(plus_measure_expectation(kGauss, PathFunctional::one(), 3, -1.0, 10, shared_U(),
                                        StreamKey::root(1)),
               DomainError);
  EXPECT_THROW(plus_measure_expectation(kGauss, PathFunctional::one(), 3, 1.0, 10, shared_V(),
                                        StreamKey::root(1)),
               DomainError);
}

TEST(Conditional, ConstantFunctionalIsExact) {
  const auto e = conditional_expectation(kGauss, PathFunctional::one(), WalkCondition::min_at_least(0.0),
                                         6, 10000, StreamKey::root(80));
  EXPECT_EQ(e.estimate, 1.0);
  EXPECT_EQ(e.se, 0.0);
  EXPECT_GT(e.accepted, 0u);
}

TEST(Conditional, SymmetricAcceptance) {
  const auto e = conditional_expectation(kGauss, PathFunctional::one(), WalkCondition::min_at_least(0.0),
                                         1, 200000, StreamKey::root(81));
  EXPECT_NEAR(e.acceptance_rate, 0.5, 4 * std::sqrt(0.25 / 200000));
}

TEST(Conditional, ScalingCrossCheck) {
  // n^{3/2} E[e^{-S_n}; L_n >= 0] stabilises: compare n = 64 and n = 128.
  double scaled[2];
  double se[2];
  int k = 0;
  for (std::size_t n : {64u, 128u}) {
    const auto e = conditional_expectation(kGauss, PathFunctional::exp_neg_final(),
                                           WalkCondition::min_at_least(0.0), n, 400000,
                                           StreamKey::root(82 + n));
    const double p = e.acceptance_rate;
    const double f = std::pow(double(n), 1.5);
    scaled[k] = f * e.estimate * p;
    se[k] = f * std::hypot(e.se * p, e.estimate * std::sqrt(p * (1 - p) / e.reps));
    ++k;
  }
  EXPECT_NEAR(scaled[0] / scaled[1], 1.0, 0.2 + 4 * std::hypot(se[0], se[1]) / scaled[1]);
}

TEST(Conditional, Errors) {
  EXPECT_THROW(conditional_expectation(IncrementLaw::two_point_lattice(1), PathFunctional::one(),
                                       WalkCondition::tau_equals(2), 4, 100, StreamKey::root(1)),
               DomainError);
  EXPECT_THROW(conditional_expectation(kGauss, PathFunctional::one(), WalkCondition::min_at_least(0.0),
                                       0, 100, StreamKey::root(1)),
               DomainError);
  // 60 steps above a barrier of 0 with 3 tries: essentially never accepted.
  EXPECT_THROW(conditional_expectation(kGauss, PathFunctional::one(), WalkCondition::min_at_least(0.0),
                                       400, 3, StreamKey::root(5)),
               NoSampleError);
}

TEST(WalkCondition, Holds) {
  const std::vector<double> s{0.0, 0.5, -0.2, 0.3};
  EXPECT_FALSE(WalkCondition::min_at_least(0.0).holds(s));
  EXPECT_TRUE(WalkCondition::min_at_least(0.2).holds(s));
  EXPECT_FALSE(WalkCondition::max_below(0.0).holds(s));
  EXPECT_TRUE(WalkCondition::tau_equals(2).holds(s));
}

TEST(TiltedIntegral, ConstantTablesGiveLambda) {
  const auto U = RenewalTable::constant(RenewalTable::Kind::U, {0.0, 1.0, 3.0}, 1.0);
  const auto V = RenewalTable::constant(RenewalTable::Kind::V, {0.0, -1.0, -3.0}, 1.0);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto spec = mu_nu_normalizers(U, V, lambda);
    EXPECT_NEAR(spec.c1, lambda, 1e-14);
    EXPECT_NEAR(spec.c2, lambda, 1e-14);
  }
}

TEST(TiltedIntegral, LinearTableClosedForm) {
  // T(y) = 1 + 2y: integral e^{-y}(1 + 2y) dy = 3.
  RenewalTable t;
  t.kind = RenewalTable::Kind::U;
  t.grid = {0.0, 0.7, 1.9};
  t.values = {1.0, 2.4, 4.8};
  t.stderr_values = {0, 0, 0};
  EXPECT_NEAR(tilted_integral(t, 1.0), 3.0, 1e-13);
  EXPECT_THROW(tilted_integral(t, 0.0), DomainError);
}

TEST(TiltedIntegral, GridRefinementConverges) {
  std::vector<double> coarse, fine;
  for (int k = 0; k <= 12; ++k) coarse.push_back(0.5 * k);
  for (int k = 0; k <= 24; ++k) fine.push_back(0.25 * k);
  const auto a = estimate_U(kGauss, coarse, 100000, 100000, StreamKey::root(90));
  const auto b = estimate_U(kGauss, fine, 100000, 100000, StreamKey::root(90));
  const double c1a = 1 / tilted_integral(a, 1.0);
  const double c1b = 1 / tilted_integral(b, 1.0);
  EXPECT_LT(std::fabs(c1a / c1b - 1), 0.01);
}

TEST(RenewalCsv, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "bpire_renewal_csv";
  const auto& t = shared_U();
  write_renewal_csv(t, dir / "u.csv");
  const auto back = read_renewal_csv(dir / "u.csv");
  EXPECT_EQ(back.kind, t.kind);
  EXPECT_EQ(back.grid, t.grid);
  EXPECT_EQ(back.values, t.values);
  EXPECT_EQ(back.stderr_values, t.stderr_values);
  EXPECT_EQ(back.cap, t.cap);
  EXPECT_EQ(back.paths, t.paths);
  EXPECT_EQ(back.seed, t.seed);
  std::filesystem::remove_all(dir);
}

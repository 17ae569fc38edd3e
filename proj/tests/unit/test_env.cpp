#include <gtest/gtest.h>

#include <cmath>

#include "bpire/env.hpp"
#include "bpire/errors.hpp"

using namespace bpire;

TEST(ValidateHypotheses, GaussianMoments) {
  const auto rep = validate_hypotheses(IncrementLaw::gaussian(1.0));
  EXPECT_TRUE(rep.a1_ok);
  EXPECT_TRUE(rep.a2_ok);
  EXPECT_TRUE(rep.a3_ok);
  EXPECT_EQ(rep.moments.mean, 0.0);
  EXPECT_DOUBLE_EQ(rep.moments.variance, 1.0);
  EXPECT_NEAR(rep.moments.exp_plus, std::exp(0.5), 1e-15);
  EXPECT_NEAR(rep.moments.exp_plus, 1.648721, 1e-6);
  EXPECT_DOUBLE_EQ(rep.moments.exp_minus, rep.moments.exp_plus);
}

TEST(ValidateHypotheses, LatticeFailsNonLatticeCheck) {
  const auto rep = validate_hypotheses(IncrementLaw::two_point_lattice(1.0));
  EXPECT_TRUE(rep.a2_ok);
  EXPECT_FALSE(rep.a3_ok);
  EXPECT_NEAR(rep.moments.exp_plus, std::cosh(1.0), 1e-15);
}

TEST(ValidateHypotheses, UniformExpMoment) {
  const auto rep = validate_hypotheses(IncrementLaw::uniform(1.0));
  EXPECT_NEAR(rep.moments.exp_plus, 1.175201, 1e-6);
  EXPECT_NEAR(rep.moments.exp_plus, std::sinh(1.0), 1e-14);
  EXPECT_NEAR(rep.moments.variance, 1.0 / 3.0, 1e-15);
}

TEST(ValidateHypotheses, LaplaceExpMoment) {
  const auto rep = validate_hypotheses(IncrementLaw::laplace(0.5));
  EXPECT_NEAR(rep.moments.exp_plus, 1.0 / (1.0 - 0.25), 1e-14);
  EXPECT_NEAR(rep.moments.variance, 2 * 0.25, 1e-15);
  EXPECT_TRUE(rep.a3_ok);
}

TEST(ValidateHypotheses, DegenerateHasZeroVariance) {
  const auto rep = validate_hypotheses(IncrementLaw::degenerate());
  EXPECT_EQ(rep.moments.variance, 0.0);
  EXPECT_FALSE(rep.a2_ok);
}

TEST(IncrementLaw, InvalidParametersNameTheField) {
  auto expect_param = [](auto make, const char* name) {
    try {
      make();
      FAIL() << "expected InvalidLawError";
    } catch (const InvalidLawError& e) {
      EXPECT_EQ(e.parameter(), name);
    }
  };
  expect_param([] { IncrementLaw::gaussian(0.0); }, "sigma");
  expect_param([] { IncrementLaw::gaussian(-1.0); }, "sigma");
  expect_param([] { IncrementLaw::uniform(0.0); }, "half_width");
  expect_param([] { IncrementLaw::laplace(1.0); }, "scale");
  expect_param([] { IncrementLaw::laplace(0.0); }, "scale");
  expect_param([] { IncrementLaw::two_point_lattice(-2.0); }, "step");
  expect_param([] { IncrementLaw::gaussian(NAN); }, "sigma");
}

TEST(IncrementLaw, MgfDivergesOutsideDomain) {
  EXPECT_TRUE(std::isinf(IncrementLaw::laplace(0.5).mgf(2.5)));
  EXPECT_TRUE(std::isfinite(IncrementLaw::laplace(0.5).mgf(1.9)));
}

TEST(LawFamily, NamesRoundTrip) {
  for (auto f : {LawFamily::gaussian, LawFamily::uniform, LawFamily::laplace,
                 LawFamily::two_point_lattice, LawFamily::degenerate}) {
    EXPECT_EQ(parse_law_family(to_string(f)), f);
  }
  EXPECT_FALSE(parse_law_family("Gaussian").has_value());
}

TEST(SampleIncrement, LatticeSupport) {
  RngStream r(1, 2);
  const auto law = IncrementLaw::two_point_lattice(1.0);
  int plus = 0;
  for (int k = 0; k < 10000; ++k) {
    const double x = sample_increment(law, r);
    ASSERT_TRUE(x == 1.0 || x == -1.0);
    plus += x > 0;
  }
  EXPECT_NEAR(plus / 10000.0, 0.5, 4 * 0.005);
}

TEST(SampleIncrement, GaussianEmpiricalMean) {
  RngStream r(2024, 0);
  const auto law = IncrementLaw::gaussian(1.0);
  double sum = 0, sq = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) {
    const double x = sample_increment(law, r);
    sum += x;
    sq += x * x;
  }
  EXPECT_LE(std::fabs(sum / n), 4e-3);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(SampleIncrement, OtherFamiliesMatchMoments) {
  const int n = 400000;
  for (const auto& law : {IncrementLaw::uniform(2.0), IncrementLaw::laplace(0.4)}) {
    RngStream r(7, 1);
    double sum = 0, sq = 0;
    for (int k = 0; k < n; ++k) {
      const double x = law.sample(r);
      sum += x;
      sq += x * x;
      if (law.family() == LawFamily::uniform) ASSERT_LE(std::fabs(x), 2.0);
    }
    EXPECT_NEAR(sum / n, 0.0, 4 * law.stddev() / std::sqrt(n));
    EXPECT_NEAR(sq / n / law.variance(), 1.0, 0.03);
  }
}

TEST(SampleIncrement, ReplayIsIdentical) {
  const auto law = IncrementLaw::gaussian(1.3);
  RngStream a(5, 9), b(5, 9);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(law.sample(a), law.sample(b));
}

TEST(OffspringParams, SymmetricCase) {
  const auto p = offspring_params(0.0);
  EXPECT_EQ(p.p, 0.5);
  EXPECT_EQ(p.q, 0.5);
}

TEST(OffspringParams, RatioTwo) {
  const auto p = offspring_params(std::log(2.0));
  EXPECT_NEAR(p.p, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.q, 1.0 / 3.0, 1e-15);
}

TEST(OffspringParams, ExtremeArgumentKeepsLogs) {
  const auto p = offspring_params(40.0);
  // log q = -log(1 + e^40) = -40 - log1p(e^-40), evaluated in long double.
  const long double ref = -40.0L - std::log1p(std::exp(-40.0L));
  EXPECT_NEAR(p.log_q, static_cast<double>(ref), 1e-12);
  EXPECT_GT(p.q, 0.0);
  EXPECT_EQ(p.p, 1.0 - p.q);
  const auto m = offspring_params(-700.0);
  EXPECT_NEAR(m.log_p, -700.0, 1e-12);
}

TEST(OffspringParams, ProbabilitiesSumToOneProperty) {
  RngStream r(3, 3);
  for (int k = 0; k < 10000; ++k) {
    const double x = (r.uniform01() - 0.5) * 80;
    const auto p = offspring_params(x);
    ASSERT_NEAR(p.p + p.q, 1.0, 1e-15);
    ASSERT_NEAR(p.log_p - p.log_q, x, 1e-9 * std::max(1.0, std::fabs(x)));
  }
}

TEST(OffspringParams, NonFiniteRejected) {
  EXPECT_THROW(offspring_params(NAN), DomainError);
  EXPECT_THROW(offspring_params(INFINITY), DomainError);
}

#include "bpire/env.hpp"

#include <cmath>
#include <limits>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "bpire/errors.hpp"

namespace bpire {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name, const char* family) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidLawError(name, std::string("invalid ") + family + " law: " + name +
                                    " must be finite and > 0");
  }
}

}  // namespace

std::string_view to_string(LawFamily family) {
  switch (family) {
    case LawFamily::gaussian: return "gaussian";
    case LawFamily::uniform: return "uniform";
    case LawFamily::laplace: return "laplace";
    case LawFamily::two_point_lattice: return "two_point_lattice";
    case LawFamily::degenerate: return "degenerate";
  }
  return "unknown";
}

std::optional<LawFamily> parse_law_family(std::string_view name) {
  for (auto f : {LawFamily::gaussian, LawFamily::uniform, LawFamily::laplace,
                 LawFamily::two_point_lattice, LawFamily::degenerate}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

IncrementLaw IncrementLaw::gaussian(double sigma) {
  require_positive(sigma, "sigma", "gaussian");
  return {LawFamily::gaussian, sigma};
}

IncrementLaw IncrementLaw::uniform(double half_width) {
  require_positive(half_width, "half_width", "uniform");
  return {LawFamily::uniform, half_width};
}

IncrementLaw IncrementLaw::laplace(double scale) {
  if (!(scale > 0.0 && scale < 1.0)) {
    throw InvalidLawError("scale", "invalid laplace law: scale must lie in (0, 1)");
  }
  return {LawFamily::laplace, scale};
}

IncrementLaw IncrementLaw::two_point_lattice(double step) {
  require_positive(step, "step", "two_point_lattice");
  return {LawFamily::two_point_lattice, step};
}

IncrementLaw IncrementLaw::degenerate() { return {LawFamily::degenerate, 0.0}; }

std::string_view IncrementLaw::parameter_name() const noexcept {
  switch (family_) {
    case LawFamily::gaussian: return "sigma";
    case LawFamily::uniform: return "half_width";
    case LawFamily::laplace: return "scale";
    case LawFamily::two_point_lattice: return "step";
    case LawFamily::degenerate: return "";
  }
  return "";
}

double IncrementLaw::variance() const noexcept {
  switch (family_) {
    case LawFamily::gaussian: return param_ * param_;
    case LawFamily::uniform: return param_ * param_ / 3.0;
    case LawFamily::laplace: return 2.0 * param_ * param_;
    case LawFamily::two_point_lattice: return param_ * param_;
    case LawFamily::degenerate: return 0.0;
  }
  return 0.0;
}

double IncrementLaw::stddev() const noexcept { return std::sqrt(variance()); }

double IncrementLaw::mgf(double t) const noexcept {
  if (t == 0.0) return 1.0;
  switch (family_) {
    case LawFamily::gaussian: return std::exp(0.5 * t * t * param_ * param_);
    case LawFamily::uniform: {
      const double u = t * param_;
      return std::sinh(u) / u;
    }
    case LawFamily::laplace: {
      const double u = t * param_;
      return std::fabs(u) < 1.0 ? 1.0 / (1.0 - u * u) : kInf;
    }
    case LawFamily::two_point_lattice: return std::cosh(t * param_);
    case LawFamily::degenerate: return 1.0;
  }
  return kInf;
}

double IncrementLaw::sample(RngStream& stream) const {
  switch (family_) {
    case LawFamily::gaussian:
      return boost::random::normal_distribution<double>(0.0, param_)(stream);
    case LawFamily::uniform:
      return param_ * (2.0 * stream.uniform01() - 1.0);
    case LawFamily::laplace: {
      const double magnitude = boost::random::exponential_distribution<double>(1.0 / param_)(stream);
      return (stream() >> 63) ? magnitude : -magnitude;
    }
    case LawFamily::two_point_lattice:
      return (stream() >> 63) ? param_ : -param_;
    case LawFamily::degenerate:
      return 0.0;
  }
  return 0.0;
}

HypothesisReport validate_hypotheses(const IncrementLaw& law) {
  HypothesisReport report;
  report.moments.mean = 0.0;
  report.moments.variance = law.variance();
  report.moments.exp_plus = law.mgf(1.0);
  report.moments.exp_minus = law.mgf(-1.0);
  const auto& m = report.moments;
  report.a1_ok = true;
  report.a2_ok = m.variance > 0.0 && std::isfinite(m.variance) && std::isfinite(m.exp_plus) &&
                 std::isfinite(m.exp_minus);
  report.a3_ok = !law.is_lattice();

  std::string notes = "family=" + std::string(to_string(law.family()));
  if (law.family() == LawFamily::degenerate) {
    notes += "; test-only law, zero variance violates A2";
  }
  if (law.family() == LawFamily::two_point_lattice) {
    notes += "; lattice law violates A3 (negative tests only)";
  }
  report.notes = std::move(notes);
  return report;
}

OffspringParams offspring_params(double x) {
  if (!std::isfinite(x)) throw DomainError("offspring_params: x must be finite");
  // log(1 + e^{-|x|}) is the shared correction term.
  const double soft = std::log1p(std::exp(-std::fabs(x)));
  OffspringParams out{};
  if (x >= 0.0) {
    out.log_p = -soft;
    out.log_q = -x - soft;
    out.q = std::exp(out.log_q);
    out.p = 1.0 - out.q;
  } else {
    out.log_q = -soft;
    out.log_p = x - soft;
    out.p = std::exp(out.log_p);
    out.q = 1.0 - out.p;
  }
  return out;
}

}  // namespace bpire

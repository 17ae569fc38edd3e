#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "bpire/rng.hpp"

namespace bpire {

/// Families for the law of X = log m(F). Every family is centered.
/// `degenerate` (X = 0 a.s.) is a test-only law with zero variance.
enum class LawFamily { gaussian, uniform, laplace, two_point_lattice, degenerate };

std::string_view to_string(LawFamily family);
/// Parses the lowercase family name; nullopt for unknown names.
std::optional<LawFamily> parse_law_family(std::string_view name);

/// Law of the increment X. Construct through the named factories, which
/// validate parameters and throw InvalidLawError naming the bad field.
class IncrementLaw {
 public:
  static IncrementLaw gaussian(double sigma);
  static IncrementLaw uniform(double half_width);
  /// Density proportional to exp(-|x|/scale); scale < 1 keeps E[e^{+-X}] finite.
  static IncrementLaw laplace(double scale);
  static IncrementLaw two_point_lattice(double step);
  static IncrementLaw degenerate();

  LawFamily family() const noexcept { return family_; }
  /// The family's single shape parameter (sigma, half_width, scale, step; 0 for degenerate).
  double parameter() const noexcept { return param_; }
  /// Name of the shape parameter as used in config files.
  std::string_view parameter_name() const noexcept;

  bool is_lattice() const noexcept {
    return family_ == LawFamily::two_point_lattice || family_ == LawFamily::degenerate;
  }
  double variance() const noexcept;
  double stddev() const noexcept;
  /// E[e^{tX}]; +inf where the moment generating function diverges.
  double mgf(double t) const noexcept;

  /// One draw of X.
  double sample(RngStream& stream) const;

  friend bool operator==(const IncrementLaw&, const IncrementLaw&) = default;

 private:
  IncrementLaw(LawFamily f, double p) : family_(f), param_(p) {}
  LawFamily family_;
  double param_;
};

struct LawMoments {
  double mean = 0.0;
  double variance = 0.0;
  double exp_plus = 0.0;   // E[e^X]
  double exp_minus = 0.0;  // E[e^{-X}]
  friend bool operator==(const LawMoments&, const LawMoments&) = default;
};

struct HypothesisReport {
  bool a1_ok = true;
  bool a2_ok = false;
  bool a3_ok = false;
  LawMoments moments;
  std::string notes;
  friend bool operator==(const HypothesisReport&, const HypothesisReport&) = default;
};

/// Closed-form moments of the law and the hypothesis checks they imply.
HypothesisReport validate_hypotheses(const IncrementLaw& law);

inline double sample_increment(const IncrementLaw& law, RngStream& stream) {
  return law.sample(stream);
}

/// Geometric offspring parameters for log mean offspring x: p/q = e^x, p + q = 1.
struct OffspringParams {
  double p;
  double q;
  double log_p;
  double log_q;
};

/// Throws DomainError for non-finite x.
OffspringParams offspring_params(double x);

}  // namespace bpire

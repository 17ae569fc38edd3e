#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <optional>
#include <vector>

#include "bpire/walk.hpp"

namespace bpire {

/// F(s) = 1 - 1/(A (1-s)^{-1} + B) held as (log A, log B). Geometric offspring
/// maps are closed under composition and the pair forms a monoid with
/// identity (1, 0), i.e. F(s) = s.
struct FracLinCoef {
  double log_A = 0.0;
  double log_B = -std::numeric_limits<double>::infinity();

  static FracLinCoef identity() noexcept { return {}; }
  double A() const noexcept { return std::exp(log_A); }
  double B() const noexcept { return std::exp(log_B); }
};

/// Which clans must be extinct for the event "only clan i survives".
///   strict          every other clan 0..n-1 is extinct;
///   paper_corollary clans 1..n-1 other than i are extinct, clan 0 is
///                   unconstrained when i >= 1 (closed forms of the corollary).
enum class Convention { paper_corollary, strict };

std::string_view to_string(Convention c);
std::optional<Convention> parse_convention(std::string_view name);

struct ClanProbability {
  double log_h;
  Convention convention;
  double value() const noexcept { return std::exp(log_h); }
};

/// One-step map F_k(s) = 1/(1 + e^{x}(1-s)), i.e. (A, B) = (e^{-x}, 1).
FracLinCoef flin_from_increment(double x) noexcept;

/// left o right: (A_l A_r, B_l + A_l B_r). Folding F_{0,m} with F_{m,n} gives F_{0,n}.
FracLinCoef flin_compose(const FracLinCoef& left, const FracLinCoef& right) noexcept;

/// F(s) for s in [0, 1); throws DomainError otherwise.
double flin_eval(const FracLinCoef& coef, double s);

/// F_{i,n} = F_{i+1} o ... o F_n as a left fold of one-step coefficients.
FracLinCoef flin_fold(const WalkPath& path, std::size_t i, std::size_t n);

/// F_{i,n} from the closed form built on (a_{i,n}, b_{i,n}).
FracLinCoef flin_closed_form(const WalkPath& path, std::size_t i);

/// Environment-conditional probability that only clan i is alive at
/// generation n (founder is clan 0). Throws DomainError unless 0 <= i <= n-1.
ClanProbability clan_prob(const WalkPath& path, std::size_t i,
                          Convention convention = Convention::paper_corollary);

/// log H_{i,n} for every i in [0, n-1] in one O(n) sweep.
std::vector<double> clan_log_probs(const WalkPath& path, Convention convention);

/// Probability that no clan 0..n-1 survives: a_n / (a_n + b_n).
double no_survivor_prob(const WalkPath& path);
double log_no_survivor_prob(const WalkPath& path);

/// Time-reversed weight e^{S_j} / sum_{k<j} e^{S_k} / sum_{k<n} e^{S_k}, j = n - i,
/// and e^{S_n} / sum_{k<=n} e^{S_k} / sum_{k<n} e^{S_k} for the founder (j = n).
/// Its mean over paths equals P(only clan n-j survives), paper convention;
/// pathwise it is the clan probability of the time-reversed path.
double reversed_rep_weight(const WalkPath& path, std::size_t j);
double log_reversed_rep_weight(const WalkPath& path, std::size_t j);

}  // namespace bpire

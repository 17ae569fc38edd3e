#include "bpire/gfalgebra.hpp"

#include <string>

#include "bpire/errors.hpp"
#include "bpire/logsumexp.hpp"

namespace bpire {

std::string_view to_string(Convention c) {
  return c == Convention::strict ? "strict" : "paper_corollary";
}

std::optional<Convention> parse_convention(std::string_view name) {
  if (name == "strict") return Convention::strict;
  if (name == "paper_corollary") return Convention::paper_corollary;
  return std::nullopt;
}

FracLinCoef flin_from_increment(double x) noexcept { return {-x, 0.0}; }

FracLinCoef flin_compose(const FracLinCoef& left, const FracLinCoef& right) noexcept {
  return {left.log_A + right.log_A, log_add(left.log_B, left.log_A + right.log_B)};
}

double flin_eval(const FracLinCoef& coef, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("flin_eval: s must lie in [0, 1)");
  const double t = log_add(coef.log_A - std::log1p(-s), coef.log_B);
  return -std::expm1(-t);
}

FracLinCoef flin_fold(const WalkPath& path, std::size_t i, std::size_t n) {
  if (i > n || n > path.n()) throw DomainError("flin_fold: need i <= n <= path length");
  FracLinCoef coef = FracLinCoef::identity();
  const auto x = path.increments();
  for (std::size_t k = i + 1; k <= n; ++k) coef = flin_compose(coef, flin_from_increment(x[k - 1]));
  return coef;
}

FracLinCoef flin_closed_form(const WalkPath& path, std::size_t i) {
  const auto f = log_exp_functionals(path, i);
  return {f.log_a, f.log_b};
}

namespace {

void check_index(const WalkPath& path, std::size_t i, const char* op) {
  if (path.n() == 0 || i >= path.n()) {
    throw DomainError(std::string(op) + ": i must lie in [0, n-1], got i=" + std::to_string(i) +
                      " n=" + std::to_string(path.n()));
  }
}

}  // namespace

// With E_k = -S_k and D_k = sum_{j=k}^{n} e^{E_j} (so D_0 = a_n + b_n,
// D_{i+1} = a_n + b_n - b_{i+1}):
//   paper  i = 0 : e^{E_n} / (D_0 D_1),  i >= 1 : e^{E_i + E_n} / (D_{i+1} D_1)
//   strict i >= 1: e^{E_i + E_n} / (D_0 D_{i+1})
ClanProbability clan_prob(const WalkPath& path, std::size_t i, Convention convention) {
  check_index(path, i, "clan_prob");
  const auto s = path.partial_sums();
  const std::size_t n = path.n();

  LogSumExp tail;  // D_{i+1}
  for (std::size_t k = i + 1; k <= n; ++k) tail.add(-s[k]);
  LogSumExp head;  // k = 1..i
  for (std::size_t k = 1; k <= i; ++k) head.add(-s[k]);
  LogSumExp d1 = head;
  d1.merge(tail);
  const double log_d1 = d1.value();
  const double log_d0 = log_add(-s[0], log_d1);

  double log_h;
  if (i == 0) {
    log_h = -s[n] - log_d0 - log_d1;
  } else if (convention == Convention::paper_corollary) {
    log_h = -s[i] - s[n] - tail.value() - log_d1;
  } else {
    log_h = -s[i] - s[n] - tail.value() - log_d0;
  }
  return {log_h, convention};
}

std::vector<double> clan_log_probs(const WalkPath& path, Convention convention) {
  const std::size_t n = path.n();
  if (n == 0) throw DomainError("clan_log_probs: empty path");
  const auto s = path.partial_sums();
  std::vector<double> suffix(n + 2, -std::numeric_limits<double>::infinity());
  LogSumExp acc;
  for (std::size_t k = n + 1; k-- > 0;) {
    acc.add(-s[k]);
    suffix[k] = acc.value();
  }
  const double log_d0 = suffix[0];
  const double log_d1 = suffix[1];
  std::vector<double> out(n);
  out[0] = -s[n] - log_d0 - log_d1;
  const double other = convention == Convention::paper_corollary ? log_d1 : log_d0;
  for (std::size_t i = 1; i < n; ++i) out[i] = -s[i] - s[n] - suffix[i + 1] - other;
  return out;
}

double log_no_survivor_prob(const WalkPath& path) {
  if (path.n() == 0) throw DomainError("no_survivor_prob: n must be >= 1");
  const auto s = path.partial_sums();
  LogSumExp d0;
  for (double v : s) d0.add(-v);
  return -s[path.n()] - d0.value();
}

double no_survivor_prob(const WalkPath& path) { return std::exp(log_no_survivor_prob(path)); }

double log_reversed_rep_weight(const WalkPath& path, std::size_t j) {
  const std::size_t n = path.n();
  if (j < 1 || j > n) {
    throw DomainError("reversed_rep_weight: j must lie in [1, n], got j=" + std::to_string(j) +
                      " n=" + std::to_string(n));
  }
  const auto s = path.partial_sums();
  LogSumExp first;
  for (std::size_t k = 0; k < j; ++k) first.add(s[k]);
  LogSumExp all = first;
  for (std::size_t k = j; k < n; ++k) all.add(s[k]);
  if (j == n) {
    // Founder clan: the direct form has D_0 D_1, whose reversal also counts S_n.
    LogSumExp closed = first;
    closed.add(s[n]);
    return s[n] - closed.value() - all.value();
  }
  return s[j] - first.value() - all.value();
}

double reversed_rep_weight(const WalkPath& path, std::size_t j) {
  return std::exp(log_reversed_rep_weight(path, j));
}

}  // namespace bpire

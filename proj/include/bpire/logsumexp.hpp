#pragma once

#include <cmath>
#include <limits>

namespace bpire {

/// Streaming log-sum-exp: keeps a running maximum and a Neumaier-compensated
/// sum of exp(v - max). Adding -inf is a no-op.
class LogSumExp {
 public:
  void add(double v) noexcept {
    if (v == -kInf) return;
    if (max_ == -kInf) {
      max_ = v;
      sum_ = 1.0;
      comp_ = 0.0;
      return;
    }
    if (v <= max_) {
      accumulate(std::exp(v - max_));
    } else {
      const double scale = std::exp(max_ - v);
      sum_ *= scale;
      comp_ *= scale;
      max_ = v;
      accumulate(1.0);
    }
  }

  void merge(const LogSumExp& other) noexcept {
    if (other.max_ == -kInf) return;
    if (max_ == -kInf) {
      *this = other;
      return;
    }
    if (other.max_ <= max_) {
      const double scale = std::exp(other.max_ - max_);
      accumulate(other.sum_ * scale);
      comp_ += other.comp_ * scale;
    } else {
      const double scale = std::exp(max_ - other.max_);
      const double mine = (sum_ + comp_) * scale;
      *this = other;
      accumulate(mine);
    }
  }

  /// log of the accumulated sum; -inf when empty.
  double value() const noexcept {
    if (max_ == -kInf) return -kInf;
    return max_ + std::log(sum_ + comp_);
  }

  bool empty() const noexcept { return max_ == -kInf; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  void accumulate(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double max_ = -kInf;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(e^a + e^b) without overflow.
inline double log_add(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace bpire

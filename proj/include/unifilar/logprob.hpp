#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace unifilar {

/// A probability carried as its base-2 logarithm. Zero probability is
/// represented by -infinity, which keeps products (sums of logs) and
/// comparisons well defined without special cases.
class LogProb {
 public:
  constexpr LogProb() = default;
  constexpr explicit LogProb(double log2_value) : value_(log2_value) {}

  static constexpr LogProb zero() { return LogProb(-std::numeric_limits<double>::infinity()); }
  static constexpr LogProb one() { return LogProb(0.0); }
  static LogProb from_prob(double p) { return p <= 0.0 ? zero() : LogProb(std::log2(p)); }

  constexpr double value() const { return value_; }
  constexpr bool is_zero() const { return value_ == -std::numeric_limits<double>::infinity(); }
  double prob() const { return is_zero() ? 0.0 : std::exp2(value_); }

  friend constexpr LogProb operator*(LogProb a, LogProb b) { return LogProb(a.value_ + b.value_); }
  friend constexpr LogProb operator/(LogProb a, LogProb b) { return LogProb(a.value_ - b.value_); }
  LogProb& operator*=(LogProb o) {
    value_ += o.value_;
    return *this;
  }
  friend constexpr auto operator<=>(LogProb a, LogProb b) { return a.value_ <=> b.value_; }
  friend constexpr bool operator==(LogProb a, LogProb b) { return a.value_ == b.value_; }

 private:
  double value_ = 0.0;
};

/// log2(2^a + 2^b), exact for zero operands.
double log2_add(double a, double b);

/// log2(sum_i 2^{v_i}) accumulated in index order after shifting by the
/// maximum. Returns -inf for an empty span or all -inf entries.
double log2_sum_exp2(std::span<const double> values);

/// Binary entropy h(p) in bits with 0 log 0 = 0.
double binary_entropy(double p);

/// -sum p log2 p over a distribution, 0 log 0 = 0.
double entropy_bits(std::span<const double> dist);

/// Fixed-order pairwise (tree) summation: the result depends only on the
/// values and their order, never on how the work was split.
double pairwise_sum(std::span<const double> values);

}  // namespace unifilar

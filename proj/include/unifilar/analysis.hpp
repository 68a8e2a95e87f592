#pragma once

#include <string>
#include <vector>

#include "unifilar/mixture.hpp"
#include "unifilar/model.hpp"

namespace unifilar {

/// sum_y pi(y) H(epsilon(.|y)) under the stationary distribution.
double entropy_rate_unifilar(const UnifilarModel& model);

/// H(X_1^m) for m = 1..n by one prefix-tree traversal, using the model's own
/// initial distribution. Refuses when |X|^n exceeds 2^max_log2_strings.
std::vector<double> block_entropies(const UnifilarModel& model, int n,
                                    double max_log2_strings = 20.0);
double exact_block_entropy(const UnifilarModel& model, int n, double max_log2_strings = 20.0);

/// H(X_1^n) - n h.
double excess_entropy_partial(const UnifilarModel& model, int n,
                              double max_log2_strings = 20.0);

struct SeriesPoint {
  double n = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct ScalingSeries {
  std::string quantity;
  std::string process;
  std::string mode;
  std::vector<SeriesPoint> points;

  /// Throws invalid_input unless n is strictly increasing and stderr >= 0.
  void validate() const;
  friend bool operator==(const ScalingSeries&, const ScalingSeries&) = default;
};

/// 2 S(n) - S(2n) at every n whose double is also present. Points without a
/// partner are skipped and named in `notices` when given.
ScalingSeries j_function(const ScalingSeries& series,
                         std::vector<std::string>* notices = nullptr);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool exact() const { return lo == hi; }
};

/// log2 P(x) - log2 P(x_1^n) - log2 P(x_{n+1}^{2n}) under the Ryabko mixture,
/// for x of length 2n.
Interval mixture_mi(std::span<const Symbol> x, const Alphabet& alphabet, ComplexityTable& table,
                    int band, const ExactEnvelope& env = {});

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  double residual = 0.0;  // root mean square, in log2 units
  int points = 0;
};

/// Least-squares slope of log2 max(1, value) against log2 n over points with
/// n_min <= n <= n_max. Needs at least three points.
ExponentFit hilberg_exponent(const ScalingSeries& series, double n_min, double n_max);

}  // namespace unifilar

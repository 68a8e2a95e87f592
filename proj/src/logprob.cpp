#include "unifilar/logprob.hpp"

#include <algorithm>
#include <cmath>

namespace unifilar {

double log2_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log2(1.0 + std::exp2(b - a));
}

double log2_sum_exp2(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  double acc = 0.0;
  for (double v : values) acc += std::exp2(v - peak);
  return peak + std::log2(acc);
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double entropy_bits(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  // Split at the largest power of two below the size, which makes the tree
  // coincide with the prefix tree when the span holds |X|^n leaves in
  // lexicographic order and |X| = 2.
  std::size_t half = 1;
  while (half * 2 < values.size()) half *= 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace unifilar

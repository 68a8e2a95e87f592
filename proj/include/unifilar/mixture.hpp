#pragma once

#include <span>
#include <vector>

#include "unifilar/nml.hpp"

namespace unifilar {

/// Prior weight of order k: 1/k - 1/(k+1).
double weight(int k);
double log2_weight(int k);

struct OrderContribution {
  int k = 1;
  double weight = 0.0;
  NmlValue nml;
};

/// log2 of the Ryabko mixture, kept as [lo, hi] when some normalizers are
/// bracketed. `orders` covers k = 1..n-1; `tail` is (1/n)|X|^{-n}, the exact
/// sum of every k >= n term.
struct MixtureValue {
  LogProb lo;
  LogProb hi;
  std::vector<OrderContribution> orders;
  LogProb tail;
  bool exact() const { return lo == hi; }
};

/// Mixture from precomputed log2 ML(x|k), k = 1..n-1 (extra entries ignored).
MixtureValue mixture_from_profile(std::span<const double> log_ml, int n, const Alphabet& alphabet,
                                  ComplexityTable& table, int band,
                                  const ExactEnvelope& env = {}, int threads = 1);

MixtureValue log_ryabko(std::span<const Symbol> x, const Alphabet& alphabet,
                        ComplexityTable& table, int band, const ExactEnvelope& env = {},
                        int threads = 1);

/// Smallest k maximizing NML(x|k). Throws indeterminate when a bracketed
/// order could still be the maximizer.
int nml_argmax(std::span<const Symbol> x, const Alphabet& alphabet, ComplexityTable& table,
               int band, const ExactEnvelope& env = {});

struct SandwichReport {
  int argmax = 1;
  double log_mixture = 0.0;
  /// log2 NML(x|argmax) - log2 P(x)
  double left_slack = 0.0;
  /// log2 P(x) - log2 w_k - log2 NML(x|k) for k = 1..n
  std::vector<double> right_slack;
  double min_slack() const;
};

/// Checks NML(x|G) >= P(x) >= w_k NML(x|k) for every k <= n. Needs exact
/// cells; throws invariant when a bound fails by more than 1e-9.
SandwichReport sandwich_check(std::span<const Symbol> x, const Alphabet& alphabet,
                              ComplexityTable& table, int band, const ExactEnvelope& env = {});

}  // namespace unifilar

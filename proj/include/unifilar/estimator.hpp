#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "unifilar/mixture.hpp"

namespace unifilar {

enum class EstimatorMode { exact, surrogate };

/// Estimated unifilar order; [lo, hi] when bracketed normalizers leave the
/// exact-mode answer undetermined.
struct OrderEstimate {
  int lo = 1;
  int hi = 1;
  EstimatorMode mode = EstimatorMode::exact;
  bool determinate() const { return lo == hi; }
};

/// LZ78 incremental parse. Phrase j is (index of its prefix phrase, 0 for the
/// empty phrase; fresh symbol). A final phrase that repeats an earlier one
/// has symbol -1.
struct Lz78Parse {
  std::vector<std::pair<std::uint32_t, int>> phrases;
  double codelength = 0.0;
};

Lz78Parse lz78_parse(std::span<const Symbol> x, int alphabet_size = 2);

/// sum_{j=1}^{c} (ceil(log2 j) + ceil(log2 |X|)) over the c phrases.
double lz78_codelength(std::span<const Symbol> x, int alphabet_size = 2);

/// min{k : log2 ML(x|k) >= log2 w_n + log2 P(x)} evaluated against both ends
/// of the mixture bracket. `log_ml` holds k = 1..n-1 (orders >= n saturate).
OrderEstimate estimate_from_profile(std::span<const double> log_ml, int n,
                                    const MixtureValue& mixture);

OrderEstimate order_estimate_exact(std::span<const Symbol> x, const Alphabet& alphabet,
                                   ComplexityTable& table, int band,
                                   const ExactEnvelope& env = {});

/// Same rule with the LZ78 code in place of the mixture. Orders are searched
/// upwards and only until the rule fires.
OrderEstimate order_estimate_surrogate(std::span<const Symbol> x, const Alphabet& alphabet);

}  // namespace unifilar

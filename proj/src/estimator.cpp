#include "unifilar/estimator.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "unifilar/error.hpp"

namespace unifilar {

namespace {

int ceil_log2(std::uint64_t v) { return v <= 1 ? 0 : std::bit_width(v - 1); }

// Absorbs rounding in ML values that equal the threshold exactly.
constexpr double kTriggerTol = 1e-12;

}  // namespace

Lz78Parse lz78_parse(std::span<const Symbol> x, int alphabet_size) {
  Lz78Parse out;
  std::map<std::pair<std::uint32_t, int>, std::uint32_t> trie;
  std::uint32_t node = 0;
  for (Symbol s : x) {
    auto it = trie.find({node, s});
    if (it != trie.end()) {
      node = it->second;
      continue;
    }
    out.phrases.emplace_back(node, s);
    trie.emplace(std::make_pair(node, static_cast<int>(s)),
                 static_cast<std::uint32_t>(out.phrases.size()));
    node = 0;
  }
  if (node != 0) out.phrases.emplace_back(node, -1);
  const int per_symbol = ceil_log2(static_cast<std::uint64_t>(alphabet_size));
  for (std::size_t j = 1; j <= out.phrases.size(); ++j)
    out.codelength += ceil_log2(j) + per_symbol;
  return out;
}

double lz78_codelength(std::span<const Symbol> x, int alphabet_size) {
  return lz78_parse(x, alphabet_size).codelength;
}

OrderEstimate estimate_from_profile(std::span<const double> log_ml, int n,
                                    const MixtureValue& mixture) {
  require(n >= 1, ErrorCategory::invalid_input, "estimator needs a non-empty string");
  const double lw = log2_weight(n);
  auto first = [&](double log_mix) {
    for (int k = 1; k < n; ++k)
      if (log_ml[k - 1] + kTriggerTol >= lw + log_mix) return k;
    return n;
  };
  return {first(mixture.lo.value()), first(mixture.hi.value()), EstimatorMode::exact};
}

OrderEstimate order_estimate_exact(std::span<const Symbol> x, const Alphabet& alphabet,
                                   ComplexityTable& table, int band, const ExactEnvelope& env) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, ErrorCategory::invalid_input, "estimator needs a non-empty string");
  const auto profile = exact_log_ml_profile(x, n - 1, alphabet.size);
  const auto mix = mixture_from_profile(profile, n, alphabet, table, band, env);
  return estimate_from_profile(profile, n, mix);
}

OrderEstimate order_estimate_surrogate(std::span<const Symbol> x, const Alphabet& alphabet) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, ErrorCategory::invalid_input, "estimator needs a non-empty string");
  const double threshold = log2_weight(n) - lz78_codelength(x, alphabet.size);
  for (int k = 1; k < n; ++k) {
    const double ml = exact_log_ml(x, k, alphabet.size).log_ml.value();
    if (ml + kTriggerTol >= threshold) return {k, k, EstimatorMode::surrogate};
  }
  return {n, n, EstimatorMode::surrogate};
}

}  // namespace unifilar

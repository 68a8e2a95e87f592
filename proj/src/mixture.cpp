#include "unifilar/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unifilar/error.hpp"

namespace unifilar {

double weight(int k) {
  require(k >= 1, ErrorCategory::invalid_input, "order must be >= 1");
  return 1.0 / (static_cast<double>(k) * (k + 1.0));
}

double log2_weight(int k) {
  require(k >= 1, ErrorCategory::invalid_input, "order must be >= 1");
  return -std::log2(static_cast<double>(k)) - std::log2(k + 1.0);
}

MixtureValue mixture_from_profile(std::span<const double> log_ml, int n, const Alphabet& alphabet,
                                  ComplexityTable& table, int band, const ExactEnvelope& env,
                                  int threads) {
  require(n >= 1, ErrorCategory::invalid_input, "mixture needs a non-empty string");
  require(log_ml.size() + 1 >= static_cast<std::size_t>(n), ErrorCategory::invalid_input,
          "likelihood profile shorter than n - 1");
  MixtureValue out;
  out.tail = LogProb(-std::log2(static_cast<double>(n)) - n * alphabet.log2_size());
  std::vector<double> lo_terms, hi_terms;
  for (int k = 1; k < n; ++k) {
    const Bracket c = complexity(n, k, alphabet, table, band, env, threads);
    const NmlValue v = nml_from_ml(log_ml[k - 1], c);
    out.orders.push_back({k, weight(k), v});
    lo_terms.push_back(log2_weight(k) + v.lo.value());
    hi_terms.push_back(log2_weight(k) + v.hi.value());
  }
  lo_terms.push_back(out.tail.value());
  hi_terms.push_back(out.tail.value());
  out.lo = LogProb(log2_sum_exp2(lo_terms));
  out.hi = LogProb(log2_sum_exp2(hi_terms));
  return out;
}

MixtureValue log_ryabko(std::span<const Symbol> x, const Alphabet& alphabet,
                        ComplexityTable& table, int band, const ExactEnvelope& env, int threads) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, ErrorCategory::invalid_input, "mixture needs a non-empty string");
  const auto profile = exact_log_ml_profile(x, n - 1, alphabet.size);
  return mixture_from_profile(profile, n, alphabet, table, band, env, threads);
}

namespace {

// NML(x|k) for k = 1..n; orders >= n are uniform.
std::vector<NmlValue> nml_profile(std::span<const Symbol> x, const Alphabet& alphabet,
                                  ComplexityTable& table, int band, const ExactEnvelope& env) {
  const int n = static_cast<int>(x.size());
  const auto profile = exact_log_ml_profile(x, n - 1, alphabet.size);
  std::vector<NmlValue> out;
  for (int k = 1; k < n; ++k)
    out.push_back(nml_from_ml(profile[k - 1], complexity(n, k, alphabet, table, band, env)));
  const LogProb uniform(-n * alphabet.log2_size());
  out.push_back({uniform, uniform});
  return out;
}

constexpr double kTieTol = 1e-12;

}  // namespace

int nml_argmax(std::span<const Symbol> x, const Alphabet& alphabet, ComplexityTable& table,
               int band, const ExactEnvelope& env) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, ErrorCategory::invalid_input, "argmax needs a non-empty string");
  const auto nml = nml_profile(x, alphabet, table, band, env);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : nml)
    if (v.exact()) best = std::max(best, v.lo.value());
  for (std::size_t i = 0; i < nml.size(); ++i) {
    if (!nml[i].exact() && nml[i].hi.value() >= best - kTieTol)
      fail(ErrorCategory::indeterminate,
           "NML argmax is ambiguous: order " + std::to_string(i + 1) + " is bracketed");
  }
  for (std::size_t i = 0; i < nml.size(); ++i)
    if (nml[i].lo.value() >= best - kTieTol) return static_cast<int>(i) + 1;
  return n;
}

double SandwichReport::min_slack() const {
  double m = left_slack;
  for (double s : right_slack) m = std::min(m, s);
  return m;
}

SandwichReport sandwich_check(std::span<const Symbol> x, const Alphabet& alphabet,
                              ComplexityTable& table, int band, const ExactEnvelope& env) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, ErrorCategory::invalid_input, "sandwich check needs a non-empty string");
  const auto nml = nml_profile(x, alphabet, table, band, env);
  for (const auto& v : nml)
    require(v.exact(), ErrorCategory::indeterminate, "sandwich check needs exact normalizers");
  const auto mix = log_ryabko(x, alphabet, table, band, env);
  SandwichReport r;
  r.argmax = nml_argmax(x, alphabet, table, band, env);
  r.log_mixture = mix.lo.value();
  r.left_slack = nml[r.argmax - 1].lo.value() - r.log_mixture;
  for (int k = 1; k <= n; ++k)
    r.right_slack.push_back(r.log_mixture - log2_weight(k) - nml[k - 1].lo.value());
  if (r.min_slack() < -1e-9)
    fail(ErrorCategory::invariant, "sandwich bound violated by " + std::to_string(-r.min_slack()));
  return r;
}

}  // namespace unifilar

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "unifilar/error.hpp"
#include "unifilar/likelihood.hpp"
#include "unifilar/random.hpp"

using namespace unifilar;

namespace {

SymbolString random_string(Rng& rng, int n, int a) {
  SymbolString x(n);
  for (auto& s : x) s = static_cast<Symbol>(rng.next_u64() % a);
  return x;
}

oracle::Fraction fraction_of(const MlResult& r) {
  std::vector<int> c(r.counts.counts.begin(), r.counts.counts.end());
  return oracle::fraction_from_counts(c, r.counts.k, r.counts.symbols);
}

}  // namespace

TEST_CASE("plug-in likelihood by hand") {
  const SymbolString x{0, 0, 1, 1};
  AutomatonSpec one(1, 2);
  one.assign(0, 0, 0);
  one.assign(0, 1, 0);
  CHECK(plugin_log_ml(x, one, 1).value() == doctest::Approx(-4.0));
  CHECK(plugin_log_ml(SymbolString(5, 1), one, 1).value() == 0.0);

  AutomatonSpec two(2, 2);
  two.assign(0, 0, 1);
  two.assign(1, 1, 0);
  CHECK(plugin_log_ml(SymbolString{0, 1, 0, 1}, two, 2).value() == 0.0);
  CHECK_THROWS_AS(plugin_log_ml(SymbolString{0, 0, 0}, two, 2), Error);
}

TEST_CASE("plug-in value is maximal over emission grids") {
  // counts (2, 2): p^2 (1-p)^2 peaks at p = 1/2 with value 1/16.
  double best = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    best = std::max(best, p * p * (1 - p) * (1 - p));
  }
  CHECK(std::log2(best) <= -4.0 + 1e-12);
  CHECK(std::log2(best) >= -4.0 - 1e-5);
}

TEST_CASE("exact ML goldens for 0011") {
  const SymbolString x{0, 0, 1, 1};
  CHECK(exact_log_ml(x, 1).log_ml.value() == doctest::Approx(std::log2(1.0 / 16)));
  CHECK(exact_log_ml(x, 2).log_ml.value() == doctest::Approx(std::log2(4.0 / 27)));
  CHECK(exact_log_ml(x, 3).log_ml.value() == 0.0);
  CHECK(oracle::naive_ml(x, 2, 2).same({4, 27}));
}

TEST_CASE("argmax reproduces the reported likelihood") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_string(rng, 1 + static_cast<int>(rng.next_u64() % 12), 2);
    const int k = 1 + static_cast<int>(rng.next_u64() % 4);
    const auto r = exact_log_ml(x, k);
    CHECK(path_counts(x, r.argmax) == r.counts);
    CHECK(plugin_log_ml(x, r.argmax, k).value() == r.log_ml.value());
    CHECK(r.argmax.start == 0);
  }
}

TEST_CASE("saturation, monotonicity and subadditivity") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    const auto x = random_string(rng, n, 2);
    CHECK(exact_log_ml(x, n).log_ml.value() == 0.0);
    double prev = -1e300;
    for (int k = 1; k <= n; ++k) {
      const double v = exact_log_ml(x, k).log_ml.value();
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    const auto u = random_string(rng, 1 + static_cast<int>(rng.next_u64() % 6), 2);
    const auto v = random_string(rng, 1 + static_cast<int>(rng.next_u64() % 6), 2);
    SymbolString uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    const int k = 1 + static_cast<int>(rng.next_u64() % 3);
    // Parameters fitted to u.v are admissible for each part separately.
    CHECK(exact_log_ml(uv, k).log_ml.value() <=
          exact_log_ml(u, k).log_ml.value() + exact_log_ml(v, k).log_ml.value() + 1e-9);
  }
}

TEST_CASE("lazy canonical search equals naive enumeration") {
  Rng rng(8);
  for (int t = 0; t < 60; ++t) {
    const int a = 2 + static_cast<int>(rng.next_u64() % 2);
    const auto x = random_string(rng, 1 + static_cast<int>(rng.next_u64() % 8), a);
    for (int k = 1; k <= 3; ++k) {
      const auto r = exact_log_ml(x, k, a);
      const auto naive = oracle::naive_ml(x, k, a);
      CHECK(fraction_of(r).same(naive));
      CHECK(r.log_ml.value() == doctest::Approx(naive.log2()).epsilon(1e-12));
    }
  }
}

TEST_CASE("profile agrees with single-order search") {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    const auto x = random_string(rng, 1 + static_cast<int>(rng.next_u64() % 16), 2);
    const auto prof = exact_log_ml_profile(x, 8, 2);
    for (int k = 1; k <= 8; ++k) CHECK(prof[k - 1] == doctest::Approx(exact_log_ml(x, k).log_ml.value()).epsilon(1e-12));
  }
}

TEST_CASE("tabulated ML matches per-string search") {
  const auto t1 = build_ml_table(2, 1, 9);
  const auto t2 = build_ml_table(2, 2, 9, &t1, 3);
  for (int len = 1; len <= 9; ++len)
    for (std::uint64_t c = 0; c < (1u << len); ++c) {
      const auto x = decode_string(c, len, 2);
      CHECK(string_code(x, 2) == c);
      CHECK(t2.row(len)[c] == doctest::Approx(exact_log_ml(x, 2).log_ml.value()).epsilon(1e-12));
    }
  const auto serial = build_ml_table(2, 2, 9, &t1, 1);
  for (int len = 1; len <= 9; ++len)
    for (std::size_t i = 0; i < serial.row(len).size(); ++i) CHECK(serial.row(len)[i] == t2.row(len)[i]);
}

TEST_CASE("optimistic bound") {
  CHECK(optimistic_bound(CountMatrix(2, 2), 5).value() == 0.0);
  Rng rng(14);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 7);
    const int k = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto x = random_string(rng, n, 2);
    const auto best = exact_log_ml(x, k);
    CHECK(optimistic_bound(best.counts, 0).value() == best.log_ml.value());
    // Every prefix of the optimal walk must bound the full optimum.
    for (int m = 0; m <= n; ++m) {
      const std::span<const Symbol> prefix(x.data(), m);
      const auto partial = path_counts(prefix, best.argmax);
      const auto suffix = exact_log_ml(std::span<const Symbol>(x).subspan(m), k).log_ml;
      CHECK(optimistic_bound(partial, n - m).value() >= best.log_ml.value() - 1e-12);
      CHECK(optimistic_bound(partial, n - m, suffix).value() >= best.log_ml.value() - 1e-12);
    }
  }
}

TEST_CASE("empty string and order checks") {
  CHECK(exact_log_ml(SymbolString{}, 2).log_ml.value() == 0.0);
  CHECK_THROWS_AS(exact_log_ml(SymbolString{0}, 0), Error);
}

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "unifilar/error.hpp"
#include "unifilar/processes.hpp"

using namespace unifilar;

namespace {

SymbolString S(const std::string& s) {
  SymbolString x;
  for (char c : s) x.push_back(static_cast<Symbol>(c - '0'));
  return x;
}

// Word of index k written out from its binary expansion, independently of psi.
SymbolString word_of(std::uint64_t k) {
  SymbolString w;
  while (k > 1) {
    w.insert(w.begin(), static_cast<Symbol>(k & 1));
    k >>= 1;
  }
  return w;
}

}  // namespace

TEST_CASE("word indexing") {
  CHECK(psi(1).empty());
  CHECK(psi(2) == S("0"));
  CHECK(psi(3) == S("1"));
  CHECK(psi(4) == S("00"));
  CHECK(psi(5) == S("01"));
  for (std::uint64_t k = 1; k <= 1000000; ++k) {
    if (phi(psi(k)) != k) FAIL("round trip failed at " << k);
  }
  for (std::uint64_t k = 1; k < (1u << 12); ++k) CHECK(psi(k) == word_of(k));
  for (int len = 0; len <= 20; ++len)
    for (std::uint64_t v = 0; v < (1ull << len); v += (len > 14 ? 997 : 1)) {
      SymbolString w(len);
      for (int i = 0; i < len; ++i) w[i] = static_cast<Symbol>((v >> (len - 1 - i)) & 1);
      if (psi(phi(w)) != w) FAIL("inverse failed");
    }
  CHECK_THROWS_AS(phi(SymbolString(64, 0)), Error);
}

TEST_CASE("oracle stationary masses") {
  CHECK(oracle_stationary_pi(0.5, {false, {}}) == doctest::Approx(1.0 / 3.0));
  CHECK(oracle_stationary_pi(0.5, {false, S("0")}) == doctest::Approx(1.0 / 12.0));
  CHECK(oracle_stationary_pi(0.5, {true, {}}) == doctest::Approx(1.0 / 6.0));
  for (double theta : {0.2, 0.5, 0.8}) {
    double total = 0.0;
    for (int l = 0; l <= 200; ++l) {
      const double per = oracle_stationary_pi(theta, {false, SymbolString(l, 1)});
      total += std::ldexp(per * (2.0 - theta), l);
    }
    CHECK(total == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(oracle_stationary_pi(1.0, {}), Error);
}

TEST_CASE("oracle entropy closed forms") {
  for (double theta = 0.2; theta < 0.81; theta += 0.1) {
    // -sum pi log pi over 2^l words of each length, a- and b-states.
    double h = 0.0;
    const double pa = (1.0 - theta) / (2.0 - theta);
    for (int l = 0; l <= 400; ++l) {
      const double a = pa * std::pow(theta / 2.0, l), b = (1.0 - theta) * a;
      if (a <= 0.0) break;
      h -= std::ldexp(a * std::log2(a) + b * std::log2(b), l);
    }
    CHECK(oracle_state_entropy(theta) == doctest::Approx(h).epsilon(1e-10));
  }
  CHECK(oracle_state_entropy(0.5) == doctest::Approx(3.918296).epsilon(1e-6));
  CHECK(oracle_entropy_rate(2.0 / 3.0) == doctest::Approx(1.188722).epsilon(1e-6));
  CHECK(oracle_beta(0.5) == doctest::Approx(0.5));
  CHECK(oracle_beta(0.25) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("truncated oracle models") {
  const auto lumped = oracle_lumped_model(0.5, 6);
  const auto pi = stationary_pi(lumped);
  CHECK(pi[0] == doctest::Approx(1.0 / 3.0));
  CHECK(pi[7] == doctest::Approx(1.0 / 6.0));
  CHECK(stationary_residual(lumped, lumped.pi()) < 1e-12);

  const auto src = OracleSource::seeded(9);
  const int depth = 5;
  const auto words = oracle_word_model(0.5, depth, src);
  const auto wpi = stationary_pi(words);
  for (std::uint64_t k = 1; k < (1u << depth); ++k) {
    const OracleState a{false, psi(k)}, b{true, psi(k)};
    CHECK(wpi[oracle_word_state(a, depth)] == doctest::Approx(oracle_stationary_pi(0.5, a)));
    CHECK(wpi[oracle_word_state(b, depth)] == doctest::Approx(oracle_stationary_pi(0.5, b)));
  }
  const State b1 = oracle_word_state({true, psi(6)}, depth);
  CHECK(words.epsilon(b1, static_cast<Symbol>(src.bit(6))) == 1.0);
}

TEST_CASE("oracle samples") {
  const OracleConfig cfg{0.5, OracleSource::seeded(4)};
  CHECK(oracle_sample(cfg, 500, 1) == oracle_sample(cfg, 500, 1));
  CHECK(oracle_sample(cfg, 500, 1) != oracle_sample(cfg, 500, 2));
  const auto x = oracle_sample(cfg, 200000, 5);
  const auto p = parse_blocks(x);
  double len = 0.0;
  for (const auto& b : p.blocks) {
    len += static_cast<double>(b.word.size());
    CHECK(b.z == cfg.source.bit(phi(b.word)));
  }
  // Word lengths are geometric with mean theta / (1 - theta).
  CHECK(len / static_cast<double>(p.blocks.size()) == doctest::Approx(1.0).epsilon(0.03));

  const auto w = oracle_sample_words(cfg, 100, 3);
  const auto pw = parse_blocks(w);
  CHECK(pw.blocks.size() == 100);
  CHECK(pw.remainder.empty());
  CHECK(pw.reconstruct() == w);
}

TEST_CASE("predictor") {
  CHECK(predictor_g(1, S("02120")) == 0);
  CHECK(predictor_g(1, S("0212021")) == 2);
  CHECK(predictor_g(2, S("02120")) == 2);
  CHECK(predictor_g(3, S("1201211")) == 1);
  const auto src = OracleSource::from_bits({0, 1});
  CHECK(facts_count(S("02120"), src) == 2);

  const OracleConfig cfg{0.5, OracleSource::seeded(8)};
  const auto x = oracle_sample(cfg, 5000, 2);
  const PredictorIndex index(x);
  for (std::uint64_t k = 1; k <= 300; ++k) CHECK(index.g(k) == predictor_g(k, x));
  // An oracle string never contradicts its own bits.
  for (std::uint64_t k = 1; k <= 300; ++k) CHECK(index.g(k) != 1 - cfg.source.bit(k));
}

TEST_CASE("block parsing and statistics") {
  const auto x = S("120210121");
  const auto p = parse_blocks(x);
  CHECK(p.w0 == S("1"));
  REQUIRE(p.z0.has_value());
  CHECK(*p.z0 == 0);
  REQUIRE(p.blocks.size() == 2);
  CHECK(p.blocks[0] == Block{{}, 1});
  CHECK(p.blocks[1] == Block{S("01"), 1});
  CHECK(p.reconstruct() == x);
  CHECK(u_n_statistic(p) == 2);
  CHECK(m_n_statistic(p) == 9);

  for (const auto& s : {"", "0101", "2", "21", "012", "0121210", "22222", "1212120"}) {
    CHECK(parse_blocks(S(s)).reconstruct() == S(s));
  }

  const OracleConfig cfg{0.5, OracleSource::seeded(1)};
  const auto big = parse_blocks(oracle_sample_words(cfg, 400, 6));
  const auto stats = prefix_statistics(big);
  REQUIRE(stats.u.size() == 400);
  std::set<SymbolString> seen;
  std::uint64_t m = big.w0.size() + 2;
  for (std::size_t i = 0; i < big.blocks.size(); ++i) {
    if (seen.insert(big.blocks[i].word).second) m += big.blocks[i].word.size() + 2;
    std::uint64_t u = 1;
    while (seen.count(psi(u))) ++u;
    CHECK(stats.u[i] == u);
    CHECK(stats.m[i] == m);
  }
}

TEST_CASE("oracle sources") {
  const auto a = OracleSource::seeded(3), b = OracleSource::seeded(3);
  for (std::uint64_t k = 1; k < 100; ++k) CHECK(a.bit(k) == b.bit(k));
  CHECK_FALSE(a.length().has_value());

  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "unifilar_bits_ok.txt", bad = dir / "unifilar_bits_bad.txt";
  std::ofstream(good) << "0110\n1\n";
  std::ofstream(bad) << "01x0\n";
  const auto f = OracleSource::from_file(good.string());
  CHECK(f.length() == 5);
  CHECK(f.bit(2) == 1);
  CHECK(f.bit(5) == 1);
  CHECK_THROWS_AS(f.bit(6), Error);
  try {
    OracleSource::from_file(bad.string());
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::malformed_file);
  }
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_CASE("Santa Fe sampling") {
  CHECK(santa_fe_tail_bound(2.0, 1000) == doctest::Approx(1e-3));
  SantaFeConfig cfg;
  cfg.alpha = 2.0;
  cfg.k_max = 1u << 16;
  cfg.source = OracleSource::seeded(12);
  const auto s = santa_fe_sample(cfg, 200000, 7);
  std::size_t ones = 0, twos = 0;
  for (const auto& p : s) {
    CHECK(p.bit == cfg.source.bit(p.k));
    ones += p.k == 1;
    twos += p.k == 2;
  }
  CHECK(static_cast<double>(ones) / twos == doctest::Approx(4.0).epsilon(0.05));
  cfg.k_max = 10;
  CHECK_THROWS_AS(santa_fe_sample(cfg, 10, 1), Error);
}

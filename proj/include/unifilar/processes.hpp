#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "unifilar/model.hpp"

namespace unifilar {

/// Binary word for k >= 1: the binary expansion of k without its leading 1.
SymbolString psi(std::uint64_t k);
/// Inverse of psi. Words longer than 63 symbols do not fit and are rejected.
std::uint64_t phi(std::span<const Symbol> w);

/// Random-access oracle bits z_1, z_2, ... Either hashed from a seed or read
/// from an ASCII 0/1 file. Reads are const and safe to share across threads.
class OracleSource {
 public:
  static OracleSource seeded(std::uint64_t seed);
  static OracleSource from_bits(std::vector<std::uint8_t> bits, std::string origin = "bits");
  static OracleSource from_file(const std::string& path);

  /// z_k for k >= 1; throws invalid_input past the end of a finite source.
  int bit(std::uint64_t k) const;
  /// Number of bits for finite sources, nullopt when unbounded.
  std::optional<std::uint64_t> length() const;
  std::string describe() const;

 private:
  OracleSource() = default;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> bits_;
  std::string origin_;
};

struct OracleConfig {
  double theta = 0.5;
  OracleSource source = OracleSource::seeded(0);
};

/// Hidden state of the Oracle process: a-state collecting word y, or b-state
/// about to emit z_{phi(y)}.
struct OracleState {
  bool b = false;
  SymbolString word;
  friend bool operator==(const OracleState&, const OracleState&) = default;
};

struct OracleRealization {
  SymbolString symbols;
  OracleState start;
  /// log2 of the start-state mass times every emission probability.
  double path_log2_prob = 0.0;
};

/// Runs the chain from a stationary start for n symbols.
OracleRealization oracle_realize(const OracleConfig& cfg, std::size_t n, std::uint64_t seed);
SymbolString oracle_sample(const OracleConfig& cfg, std::size_t n, std::uint64_t seed);
/// Runs the chain until `words` blocks W_i 2 Z_i with i >= 1 are complete.
SymbolString oracle_sample_words(const OracleConfig& cfg, std::size_t words, std::uint64_t seed);

double oracle_stationary_pi(double theta, const OracleState& state);
double oracle_state_entropy(double theta);
double oracle_entropy_rate(double theta);
/// 1 / (1 - log2 theta).
double oracle_beta(double theta);

/// Oracle(theta) with words lumped by length up to `depth`: states a_l and b_l
/// for l = 0..depth, a_depth absorbing longer words. b-states emit a fixed
/// symbol. Stationary masses and entropy rate equal the full process.
UnifilarModel oracle_lumped_model(double theta, int depth);
/// Oracle(theta) with one state per word of length < depth; depth-length words
/// slide (drop their first symbol). Masses of states shorter than depth are
/// exact. State index of a word y: a-states first, ordered by phi(y).
UnifilarModel oracle_word_model(double theta, int depth, const OracleSource& source);
int oracle_word_state(const OracleState& s, int depth);

/// g(k, x): 0 if 2?psi(k)20 occurs in x and 2?psi(k)21 does not, 1 in the
/// mirrored case, 2 otherwise. Literal sliding-window scan.
int predictor_g(std::uint64_t k, std::span<const Symbol> x);

/// All (word, next bit) observations g consults, built in one pass.
class PredictorIndex {
 public:
  explicit PredictorIndex(std::span<const Symbol> x);
  int g(std::uint64_t k) const;

 private:
  // phi(word) -> bit 0: seen followed by 0, bit 1: seen followed by 1
  std::unordered_map<std::uint64_t, std::uint8_t> seen_;
};

/// min{k >= 1 : g(k, x) != z_k}.
std::uint64_t facts_count(std::span<const Symbol> x, const OracleSource& source);

struct Block {
  SymbolString word;
  Symbol z = 0;
  friend bool operator==(const Block&, const Block&) = default;
};

/// x = W_0 [2 Z_0] W_1 2 Z_1 ... W_m 2 Z_m remainder.
struct ParsedBlocks {
  SymbolString w0;
  std::optional<Symbol> z0;
  std::vector<Block> blocks;  // i >= 1
  SymbolString remainder;

  SymbolString reconstruct() const;
};

ParsedBlocks parse_blocks(std::span<const Symbol> x);

/// min{k : psi(k) not among W_1..W_n}.
std::uint64_t u_n_statistic(const ParsedBlocks& p);
/// |W_0| + 2 + sum over distinct y in {W_1..W_n} of (|y| + 2).
std::uint64_t m_n_statistic(const ParsedBlocks& p);

/// U_n and M_n for every prefix of the block list, in one pass: entry i is
/// the value over W_1..W_{i+1}.
struct PrefixStatistics {
  std::vector<std::uint64_t> u;
  std::vector<std::uint64_t> m;
};
PrefixStatistics prefix_statistics(const ParsedBlocks& p);

struct SantaFeConfig {
  double alpha = 2.0;
  std::uint64_t k_max = 1u << 20;
  double max_tail = 1e-3;
  OracleSource source = OracleSource::seeded(0);
};

/// Upper bound on the Zipf mass beyond k_max relative to the truncated sum.
double santa_fe_tail_bound(double alpha, std::uint64_t k_max);

struct SantaFePair {
  std::uint64_t k = 1;
  int bit = 0;
};

std::vector<SantaFePair> santa_fe_sample(const SantaFeConfig& cfg, std::size_t n,
                                         std::uint64_t seed);

}  // namespace unifilar

#include "unifilar/processes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "unifilar/error.hpp"
#include "unifilar/logprob.hpp"
#include "unifilar/random.hpp"

namespace unifilar {

SymbolString psi(std::uint64_t k) {
  require(k >= 1, ErrorCategory::invalid_input, "psi is defined for k >= 1");
  const int len = std::bit_width(k) - 1;
  SymbolString w(len);
  for (int i = 0; i < len; ++i) w[i] = static_cast<Symbol>((k >> (len - 1 - i)) & 1u);
  return w;
}

std::uint64_t phi(std::span<const Symbol> w) {
  require(w.size() <= 63, ErrorCategory::invalid_input, "word too long for phi");
  std::uint64_t k = 1;
  for (Symbol s : w) {
    require(s <= 1, ErrorCategory::invalid_input, "phi takes a binary word");
    k = (k << 1) | s;
  }
  return k;
}

// ---- oracle source ----

OracleSource OracleSource::seeded(std::uint64_t seed) {
  OracleSource s;
  s.seed_ = seed;
  s.origin_ = "seed:" + std::to_string(seed);
  return s;
}

OracleSource OracleSource::from_bits(std::vector<std::uint8_t> bits, std::string origin) {
  for (auto b : bits) require(b <= 1, ErrorCategory::invalid_input, "oracle bits must be 0 or 1");
  OracleSource s;
  s.bits_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(bits));
  s.origin_ = std::move(origin);
  return s;
}

OracleSource OracleSource::from_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCategory::malformed_file, "cannot open oracle file " + path);
  std::vector<std::uint8_t> bits;
  char c;
  while (in.get(c)) {
    if (c == '0' || c == '1')
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != '\n' && c != '\r')
      fail(ErrorCategory::malformed_file, "oracle file " + path + " contains a character other than 0/1");
  }
  return from_bits(std::move(bits), "file:" + path);
}

int OracleSource::bit(std::uint64_t k) const {
  require(k >= 1, ErrorCategory::invalid_input, "oracle bits are indexed from 1");
  if (bits_) {
    require(k <= bits_->size(), ErrorCategory::invalid_input,
            "oracle bit " + std::to_string(k) + " past the end of " + origin_);
    return (*bits_)[k - 1];
  }
  return static_cast<int>(derive_seed(seed_, k) >> 63);
}

std::optional<std::uint64_t> OracleSource::length() const {
  if (bits_) return bits_->size();
  return std::nullopt;
}

std::string OracleSource::describe() const { return origin_; }

// ---- Oracle(theta) ----

namespace {

void check_theta(double theta) {
  require(theta > 0.0 && theta < 1.0, ErrorCategory::invalid_input,
          "theta must lie in the open interval (0, 1)");
}

double log2_pi_a(double theta) { return std::log2(1.0 - theta) - std::log2(2.0 - theta); }

OracleState sample_start(double theta, Rng& rng) {
  OracleState s;
  s.b = rng.uniform() >= 1.0 / (2.0 - theta);
  std::size_t len = 0;
  while (rng.uniform() < theta) ++len;
  s.word.resize(len);
  for (auto& c : s.word) c = static_cast<Symbol>(rng.next_u64() >> 63);
  return s;
}

// Drives the chain; `stop` is asked after each symbol.
template <class Stop>
OracleRealization run_oracle(const OracleConfig& cfg, std::uint64_t seed, std::size_t reserve,
                             Stop stop) {
  check_theta(cfg.theta);
  Rng rng(seed);
  OracleRealization r;
  r.start = sample_start(cfg.theta, rng);
  r.path_log2_prob = oracle_stationary_pi(cfg.theta, r.start) > 0.0
                         ? std::log2(oracle_stationary_pi(cfg.theta, r.start))
                         : -std::numeric_limits<double>::infinity();
  r.symbols.reserve(reserve);
  const double half = cfg.theta / 2.0;
  const double log_half = std::log2(half), log_sep = std::log2(1.0 - cfg.theta);
  OracleState st = r.start;
  while (!stop(r.symbols, st)) {
    if (st.b) {
      r.symbols.push_back(static_cast<Symbol>(cfg.source.bit(phi(st.word))));
      st.b = false;
      st.word.clear();
    } else {
      const double u = rng.uniform();
      if (u < cfg.theta) {
        const Symbol s = u < half ? 0 : 1;
        r.symbols.push_back(s);
        st.word.push_back(s);
        r.path_log2_prob += log_half;
      } else {
        r.symbols.push_back(2);
        st.b = true;
        r.path_log2_prob += log_sep;
      }
    }
  }
  return r;
}

}  // namespace

OracleRealization oracle_realize(const OracleConfig& cfg, std::size_t n, std::uint64_t seed) {
  return run_oracle(cfg, seed, n,
                    [n](const SymbolString& x, const OracleState&) { return x.size() >= n; });
}

SymbolString oracle_sample(const OracleConfig& cfg, std::size_t n, std::uint64_t seed) {
  return oracle_realize(cfg, n, seed).symbols;
}

SymbolString oracle_sample_words(const OracleConfig& cfg, std::size_t words, std::uint64_t seed) {
  // Each separator is followed by its bit; the first closes W_0.
  std::size_t separators = 0;
  bool pending = false;
  return run_oracle(cfg, seed, 4 * words + 8,
                    [&](const SymbolString& x, const OracleState& st) {
                      if (!x.empty()) {
                        if (pending && !st.b) {
                          pending = false;
                          if (separators == words + 1) return true;
                        }
                        if (st.b && x.back() == 2 && !pending) {
                          pending = true;
                          ++separators;
                        }
                      }
                      return false;
                    })
      .symbols;
}

double oracle_stationary_pi(double theta, const OracleState& state) {
  check_theta(theta);
  const double len = static_cast<double>(state.word.size());
  const double a = std::exp2(log2_pi_a(theta) + len * std::log2(theta / 2.0));
  return state.b ? (1.0 - theta) * a : a;
}

double oracle_state_entropy(double theta) {
  check_theta(theta);
  // Summing -pi log pi over 2^l words of each length l with the geometric
  // series sum theta^l and sum l theta^l.
  const double pa = (1.0 - theta) / (2.0 - theta);
  return -std::log2(pa) - theta * std::log2(theta / 2.0) / (1.0 - theta) -
         (1.0 - theta) * std::log2(1.0 - theta) / (2.0 - theta);
}

double oracle_entropy_rate(double theta) {
  check_theta(theta);
  return (binary_entropy(theta) + theta) / (2.0 - theta);
}

double oracle_beta(double theta) {
  check_theta(theta);
  return 1.0 / (1.0 - std::log2(theta));
}

UnifilarModel oracle_lumped_model(double theta, int depth) {
  check_theta(theta);
  require(depth >= 1, ErrorCategory::invalid_input, "depth must be >= 1");
  const int k = 2 * (depth + 1);
  auto b_of = [&](int l) { return depth + 1 + l; };
  std::vector<double> pi(k), eps(k * 3, 0.0);
  std::vector<State> tau(k * 3, 0);
  const double pa = (1.0 - theta) / (2.0 - theta);
  for (int l = 0; l <= depth; ++l) {
    const double mass = l < depth ? pa * std::pow(theta, l) : pa * std::pow(theta, l) / (1.0 - theta);
    pi[l] = mass;
    pi[b_of(l)] = (1.0 - theta) * mass;
    const int next = std::min(l + 1, depth);
    tau[l * 3 + 0] = next;
    tau[l * 3 + 1] = next;
    tau[l * 3 + 2] = b_of(l);
    eps[l * 3 + 0] = eps[l * 3 + 1] = theta / 2.0;
    eps[l * 3 + 2] = 1.0 - theta;
    eps[b_of(l) * 3 + 0] = 1.0;
  }
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (auto& p : pi) p /= total;
  return UnifilarModel(Alphabet(3), std::move(pi), std::move(tau), std::move(eps),
                       "oracle-lumped");
}

int oracle_word_state(const OracleState& s, int depth) {
  require(static_cast<int>(s.word.size()) <= depth, ErrorCategory::invalid_input,
          "word longer than the model depth");
  const int a_states = (2 << depth) - 1;
  const int idx = static_cast<int>(phi(s.word)) - 1;
  return s.b ? a_states + idx : idx;
}

UnifilarModel oracle_word_model(double theta, int depth, const OracleSource& source) {
  check_theta(theta);
  require(depth >= 1 && depth <= 12, ErrorCategory::invalid_input, "depth must be in 1..12");
  const int a_states = (2 << depth) - 1;
  const int k = 2 * a_states;
  std::vector<double> pi(k, 0.0), eps(k * 3, 0.0);
  std::vector<State> tau(k * 3, 0);
  pi[0] = 1.0;
  for (int i = 0; i < a_states; ++i) {
    OracleState s{false, psi(static_cast<std::uint64_t>(i) + 1)};
    for (Symbol c = 0; c < 2; ++c) {
      OracleState t = s;
      t.word.push_back(c);
      if (static_cast<int>(t.word.size()) > depth) t.word.erase(t.word.begin());
      tau[i * 3 + c] = oracle_word_state(t, depth);
      eps[i * 3 + c] = theta / 2.0;
    }
    tau[i * 3 + 2] = a_states + i;
    eps[i * 3 + 2] = 1.0 - theta;
    const int b = a_states + i;
    eps[b * 3 + source.bit(static_cast<std::uint64_t>(i) + 1)] = 1.0;
  }
  return UnifilarModel(Alphabet(3), std::move(pi), std::move(tau), std::move(eps), "oracle-words");
}

// ---- predictor and facts ----

int predictor_g(std::uint64_t k, std::span<const Symbol> x) {
  const SymbolString w = psi(k);
  const std::size_t len = w.size() + 4;
  bool seen[2] = {false, false};
  for (std::size_t p = 0; p + len <= x.size(); ++p) {
    if (x[p] != 2 || x[p + w.size() + 2] != 2) continue;
    if (!std::equal(w.begin(), w.end(), x.begin() + p + 2)) continue;
    const Symbol b = x[p + len - 1];
    if (b <= 1) seen[b] = true;
  }
  if (seen[0] && !seen[1]) return 0;
  if (seen[1] && !seen[0]) return 1;
  return 2;
}

PredictorIndex::PredictorIndex(std::span<const Symbol> x) {
  // Every occurrence starts at a 2, skips one wildcard symbol and reads the
  // binary run up to the next 2; the symbol after that is the observation.
  const std::size_t n = x.size();
  std::vector<std::size_t> next_sep(n + 1, n);
  for (std::size_t i = n; i-- > 0;) next_sep[i] = x[i] == 2 ? i : next_sep[i + 1];
  for (std::size_t p = 0; p + 3 < n; ++p) {
    if (x[p] != 2) continue;
    const std::size_t q = next_sep[p + 2];
    if (q + 1 >= n) continue;
    const Symbol b = x[q + 1];
    if (b > 1 || q - (p + 2) > 62) continue;
    seen_[phi(x.subspan(p + 2, q - (p + 2)))] |= static_cast<std::uint8_t>(1u << b);
  }
}

int PredictorIndex::g(std::uint64_t k) const {
  const auto it = seen_.find(k);
  const std::uint8_t v = it == seen_.end() ? 0 : it->second;
  if (v == 1) return 0;
  if (v == 2) return 1;
  return 2;
}

std::uint64_t facts_count(std::span<const Symbol> x, const OracleSource& source) {
  const PredictorIndex index(x);
  std::uint64_t k = 1;
  while (index.g(k) == source.bit(k)) ++k;
  return k;
}

// ---- parsing ----

SymbolString ParsedBlocks::reconstruct() const {
  SymbolString out = w0;
  if (z0) {
    out.push_back(2);
    out.push_back(*z0);
  }
  for (const auto& b : blocks) {
    out.insert(out.end(), b.word.begin(), b.word.end());
    out.push_back(2);
    out.push_back(b.z);
  }
  out.insert(out.end(), remainder.begin(), remainder.end());
  return out;
}

ParsedBlocks parse_blocks(std::span<const Symbol> x) {
  ParsedBlocks p;
  std::size_t i = 0;
  const std::size_t n = x.size();
  bool first = true;
  while (true) {
    std::size_t j = i;
    while (j < n && x[j] != 2) ++j;
    if (j + 1 >= n) {
      // No complete separator-and-bit pair left.
      SymbolString rest(x.begin() + i, x.end());
      if (first && j == n)
        p.w0 = std::move(rest);
      else if (first) {
        p.w0.assign(x.begin() + i, x.begin() + j);
        p.remainder.assign(x.begin() + j, x.end());
      } else
        p.remainder = std::move(rest);
      break;
    }
    SymbolString w(x.begin() + i, x.begin() + j);
    if (first) {
      p.w0 = std::move(w);
      p.z0 = x[j + 1];
      first = false;
    } else {
      p.blocks.push_back({std::move(w), x[j + 1]});
    }
    i = j + 2;
  }
  return p;
}

PrefixStatistics prefix_statistics(const ParsedBlocks& p) {
  PrefixStatistics out;
  std::unordered_set<std::uint64_t> present;  // phi of binary words seen
  std::unordered_set<std::string> distinct;   // all words, binary or not
  std::uint64_t mex = 1;
  std::uint64_t m = p.w0.size() + 2;
  out.u.reserve(p.blocks.size());
  out.m.reserve(p.blocks.size());
  for (const auto& b : p.blocks) {
    const bool binary = std::all_of(b.word.begin(), b.word.end(), [](Symbol s) { return s <= 1; });
    if (binary && b.word.size() <= 63) present.insert(phi(b.word));
    if (distinct.emplace(b.word.begin(), b.word.end()).second) m += b.word.size() + 2;
    while (present.count(mex)) ++mex;
    out.u.push_back(mex);
    out.m.push_back(m);
  }
  return out;
}

std::uint64_t u_n_statistic(const ParsedBlocks& p) {
  const auto s = prefix_statistics(p);
  return s.u.empty() ? 1 : s.u.back();
}

std::uint64_t m_n_statistic(const ParsedBlocks& p) {
  const auto s = prefix_statistics(p);
  return s.m.empty() ? p.w0.size() + 2 : s.m.back();
}

// ---- Santa Fe ----

double santa_fe_tail_bound(double alpha, std::uint64_t k_max) {
  require(alpha > 1.0, ErrorCategory::invalid_input, "alpha must exceed 1");
  require(k_max >= 1, ErrorCategory::invalid_input, "k_max must be >= 1");
  const double kk = static_cast<double>(k_max);
  return std::pow(kk, 1.0 - alpha) / (alpha - 1.0);
}

std::vector<SantaFePair> santa_fe_sample(const SantaFeConfig& cfg, std::size_t n,
                                         std::uint64_t seed) {
  const double tail = santa_fe_tail_bound(cfg.alpha, cfg.k_max);
  require(tail <= cfg.max_tail, ErrorCategory::invalid_input,
          "k_max too small: Zipf tail mass bound " + std::to_string(tail) + " exceeds " +
              std::to_string(cfg.max_tail));
  std::vector<double> cdf(cfg.k_max);
  double acc = 0.0;
  for (std::uint64_t k = 1; k <= cfg.k_max; ++k) {
    acc += std::pow(static_cast<double>(k), -cfg.alpha);
    cdf[k - 1] = acc;
  }
  Rng rng(seed);
  std::vector<SantaFePair> out(n);
  for (auto& pair : out) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    pair.k = std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf.begin()) + 1, cfg.k_max);
    pair.bit = cfg.source.bit(pair.k);
  }
  return out;
}

}  // namespace unifilar

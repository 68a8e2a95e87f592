#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <tuple>
#include <vector>

#include "unifilar/likelihood.hpp"
#include "unifilar/logprob.hpp"
#include "unifilar/model.hpp"

namespace unifilar {

enum class CellMode { exact, bracket };

/// Bits of statistical complexity, possibly known only up to [lo, hi].
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  bool exact() const { return lo == hi; }
};

struct ComplexityEntry {
  int alphabet = 2;
  int n = 0;
  int k = 1;
  CellMode mode = CellMode::exact;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const ComplexityEntry&, const ComplexityEntry&) = default;
};

/// Read-mostly cache of C(n|k). Writers publish whole entries under an
/// exclusive lock; readers only ever see complete entries.
class ComplexityTable {
 public:
  ComplexityTable() = default;
  ComplexityTable(const ComplexityTable& other);
  ComplexityTable& operator=(const ComplexityTable& other);

  std::optional<ComplexityEntry> find(int alphabet, int n, int k) const;
  /// Inserts or replaces; an exact entry is never replaced by a bracket.
  void publish(const ComplexityEntry& e);
  std::vector<ComplexityEntry> entries() const;
  std::size_t size() const;

 private:
  using Key = std::tuple<int, int, int>;
  mutable std::shared_mutex mutex_;
  std::map<Key, ComplexityEntry> cells_;
};

/// Limits for exact complexity. The all-orders route enumerates every string
/// and runs branch and bound on each; the bank route evaluates every full
/// transition table on every string and only suits small k.
struct ExactEnvelope {
  double enumeration_log2_strings = 14.0;  // |X|^n <= 2^14: binary n <= 14
  int bank_max_lanes = 512;
  double bank_log2_work = 32.0;  // |X|^n * lanes <= 2^32
};

enum class ComplexityRoute { saturated, enumeration, bank };

/// Which exact route handles (n, k); nullopt when outside the envelope.
std::optional<ComplexityRoute> exact_route(int n, int k, const Alphabet& alphabet,
                                           const ExactEnvelope& env = {});

/// Number of bank lanes (canonical full transition tables) for order k.
int bank_lanes(int k, int alphabet_size);

double statistical_complexity_exact(int n, int k, const Alphabet& alphabet,
                                    const ExactEnvelope& env = {}, int threads = 1);

/// C(n|k) by evaluating every canonical full transition table on every string
/// (prefix-tree traversal sharing counts between strings). `per_string`, when
/// non-null, receives log2 ML for each string in code order.
double complexity_by_bank(int n, int k, const Alphabet& alphabet, int threads = 1,
                          std::vector<double>* per_string = nullptr);

/// C(n|k) by exact branch-and-bound on every string (tabulated suffix bounds).
double complexity_by_search(int n, int k, const Alphabet& alphabet, int threads = 1);

/// min(n log|X|, (k|X|+1) log2(k(n+1))).
double complexity_upper_bound(int n, int k, const Alphabet& alphabet);
/// The sharper intermediate bound log2(k^{k|X|+1} (n+1)^{k|X|}).
double complexity_parameter_bound(int n, int k, const Alphabet& alphabet);

/// Exact if k <= band or k >= n; otherwise [C(n|band), min(n log|X|, bound)]
/// using monotonicity of C in k. Exact cells are computed on demand and
/// published to `table`.
Bracket complexity(int n, int k, const Alphabet& alphabet, ComplexityTable& table, int band,
                   const ExactEnvelope& env = {}, int threads = 1);

/// Shared, memoized all-strings ML tables (order k, lengths <= max_len).
std::shared_ptr<const MlTable> ml_table(const Alphabet& alphabet, int k, int max_len,
                                        int threads = 1);

/// log2 ML(x|k) for k = 1..max_order. Looks values up in the memoized tables
/// when `use_tables` and |x| lies in the enumeration envelope; otherwise runs
/// the per-string branch and bound.
std::vector<double> ml_profile(std::span<const Symbol> x, int max_order, const Alphabet& alphabet,
                               bool use_tables, const ExactEnvelope& env = {}, int threads = 1);

struct NmlValue {
  LogProb lo;
  LogProb hi;
  bool exact() const { return lo == hi; }
};

NmlValue nml_from_ml(double log_ml, const Bracket& c);

NmlValue log_nml(std::span<const Symbol> x, int k, const Alphabet& alphabet,
                 ComplexityTable& table, int band, const ExactEnvelope& env = {});

}  // namespace unifilar

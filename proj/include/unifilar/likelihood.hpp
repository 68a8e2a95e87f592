#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "unifilar/logprob.hpp"
#include "unifilar/model.hpp"

namespace unifilar {

/// Start state plus a possibly partial transition map; unassigned entries
/// are -1. Only the (state, symbol) pairs visited along a string need to be
/// assigned for the plug-in likelihood to be defined.
struct AutomatonSpec {
  int k = 1;
  int symbols = 2;
  State start = 0;
  std::vector<State> tau;  // k * symbols, -1 when unassigned

  AutomatonSpec() = default;
  AutomatonSpec(int k, int symbols, State start = 0);

  State next(State y, Symbol x) const { return tau[static_cast<std::size_t>(y) * symbols + x]; }
  void assign(State y, Symbol x, State to) { tau[static_cast<std::size_t>(y) * symbols + x] = to; }
  friend bool operator==(const AutomatonSpec&, const AutomatonSpec&) = default;
};

/// Emission counts n_ab of symbol b in state a.
struct CountMatrix {
  int k = 1;
  int symbols = 2;
  std::vector<std::int32_t> counts;

  CountMatrix() = default;
  CountMatrix(int k, int symbols);

  std::int32_t at(int a, int b) const { return counts[static_cast<std::size_t>(a) * symbols + b]; }
  std::int32_t& at(int a, int b) { return counts[static_cast<std::size_t>(a) * symbols + b]; }
  std::int64_t row_total(int a) const;
  std::int64_t total() const;
  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;
};

struct MlResult {
  LogProb log_ml;
  AutomatonSpec argmax;
  CountMatrix counts;
};

/// Counts along the path driven by `automaton`; throws invalid_input when
/// the walk needs a transition the automaton leaves unassigned.
CountMatrix path_counts(std::span<const Symbol> x, const AutomatonSpec& automaton);

/// sum_ab n_ab log2(n_ab / n_a) with 0 log 0 = 0. Row terms are summed in
/// sorted order so that relabeled states give bit-identical results.
LogProb plugin_log_ml(const CountMatrix& counts);
LogProb plugin_log_ml(std::span<const Symbol> x, const AutomatonSpec& automaton, int k);

/// Upper bound on the plug-in log-likelihood of any completion of a walk whose
/// committed counts are `partial`: the maximized likelihood never increases as
/// data is appended. `suffix_bound`, when known, bounds the completion's own
/// maximized likelihood and tightens the result multiplicatively.
LogProb optimistic_bound(const CountMatrix& partial, std::size_t remaining,
                         LogProb suffix_bound = LogProb::one());

/// Exact maximum likelihood over start state, transition table and emissions
/// for k hidden states. Ties resolve to the lexicographically smallest
/// canonical (start, assignment sequence).
MlResult exact_log_ml(std::span<const Symbol> x, int k, int alphabet_size = 2);

/// log2 ML(x | k) for k = 1..max_order (values only). Entries past the first
/// saturated order are 0. Reuses each order as a floor for the next.
std::vector<double> exact_log_ml_profile(std::span<const Symbol> x, int max_order,
                                         int alphabet_size = 2);

namespace detail {

/// Branch-and-bound core. `suffix_ml[i]` must upper-bound log2 ML of
/// x[i..n) at order k (with suffix_ml[n] = 0); `floor` is a known lower bound
/// on the answer (or -inf). Exposed for the string-table builder and tests.
MlResult search_ml(std::span<const Symbol> x, int k, int alphabet_size,
                   std::span<const double> suffix_ml, double floor,
                   std::uint64_t* nodes_visited = nullptr);

/// Suffix bounds for `x` at order k by solving every suffix, shortest first.
std::vector<double> suffix_ml_bounds(std::span<const Symbol> x, int k, int alphabet_size,
                                     std::span<const double> lower_order_suffix = {});

}  // namespace detail

/// log2 ML(x|k) for every string of length 1..max_len over an alphabet,
/// indexed by the base-|X| value of the string (first symbol most
/// significant).
class MlTable {
 public:
  MlTable(int alphabet_size, int k, int max_len);

  int alphabet_size() const { return alphabet_size_; }
  int k() const { return k_; }
  int max_len() const { return max_len_; }

  std::span<const double> row(int len) const { return by_len_[len]; }
  std::span<double> row(int len) { return by_len_[len]; }
  double lookup(std::span<const Symbol> x) const;

 private:
  int alphabet_size_;
  int k_;
  int max_len_;
  std::vector<std::vector<double>> by_len_;
};

std::uint64_t string_code(std::span<const Symbol> x, int alphabet_size);
SymbolString decode_string(std::uint64_t code, int len, int alphabet_size);

/// Fill an MlTable by branch and bound over all strings, shortest first, so
/// every suffix bound is a table lookup. `lower` (order k-1, same alphabet,
/// at least as long) supplies floors when given.
MlTable build_ml_table(int alphabet_size, int k, int max_len, const MlTable* lower = nullptr,
                       int threads = 1);

}  // namespace unifilar

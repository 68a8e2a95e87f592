#include "unifilar/nml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "unifilar/error.hpp"
#include "unifilar/kernels.hpp"

namespace unifilar {

ComplexityTable::ComplexityTable(const ComplexityTable& other) {
  std::shared_lock lock(other.mutex_);
  cells_ = other.cells_;
}

ComplexityTable& ComplexityTable::operator=(const ComplexityTable& other) {
  if (this == &other) return *this;
  std::map<Key, ComplexityEntry> copy;
  {
    std::shared_lock lock(other.mutex_);
    copy = other.cells_;
  }
  std::unique_lock lock(mutex_);
  cells_ = std::move(copy);
  return *this;
}

std::optional<ComplexityEntry> ComplexityTable::find(int alphabet, int n, int k) const {
  std::shared_lock lock(mutex_);
  auto it = cells_.find({alphabet, n, k});
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

void ComplexityTable::publish(const ComplexityEntry& e) {
  require(e.lo <= e.hi, ErrorCategory::invariant, "complexity entry with lo > hi");
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cells_.try_emplace({e.alphabet, e.n, e.k}, e);
  if (inserted) return;
  if (it->second.mode == CellMode::exact && e.mode == CellMode::bracket) return;
  it->second = e;
}

std::vector<ComplexityEntry> ComplexityTable::entries() const {
  std::shared_lock lock(mutex_);
  std::vector<ComplexityEntry> out;
  out.reserve(cells_.size());
  for (const auto& [key, e] : cells_) out.push_back(e);
  return out;
}

std::size_t ComplexityTable::size() const {
  std::shared_lock lock(mutex_);
  return cells_.size();
}

namespace {

double xlog2x(double c) { return c > 0.0 ? c * std::log2(c) : 0.0; }

// Sum |X|^len leaves in code order by folding each node's children left to
// right, i.e. the same tree a depth-first traversal of the prefix tree forms.
double prefix_tree_sum(std::vector<double> level, int symbols) {
  if (level.empty()) return 0.0;
  while (level.size() > 1) {
    std::vector<double> up(level.size() / symbols);
    for (std::size_t c = 0; c < up.size(); ++c) {
      double acc = level[c * symbols];
      for (int s = 1; s < symbols; ++s) acc = acc + level[c * symbols + s];
      up[c] = acc;
    }
    level = std::move(up);
  }
  return level[0];
}

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

using TableList = std::vector<std::vector<State>>;

// Full transition tables with start state 0, one per orbit of relabelings
// that fix state 0 (the lexicographically smallest member is kept).
TableList canonical_tables(int k, int symbols) {
  const int cells = k * symbols;
  const double log_total = cells * std::log2(static_cast<double>(k));
  require(log_total <= 24.0, ErrorCategory::envelope, "too many transition tables for a bank");
  const std::uint64_t total = ipow(k, cells);
  std::vector<std::vector<int>> perms;
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin() + 1, p.end()));

  TableList out;
  std::vector<State> tau(cells), alt(cells);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    for (int i = cells; i-- > 0;) {
      tau[i] = static_cast<State>(c % k);
      c /= k;
    }
    bool minimal = true;
    for (std::size_t pi = 1; pi < perms.size() && minimal; ++pi) {
      const auto& sg = perms[pi];
      for (int y = 0; y < k; ++y)
        for (int x = 0; x < symbols; ++x) alt[sg[y] * symbols + x] = sg[tau[y * symbols + x]];
      if (std::lexicographical_compare(alt.begin(), alt.end(), tau.begin(), tau.end()))
        minimal = false;
    }
    if (minimal) out.push_back(tau);
  }
  return out;
}

const TableList& cached_tables(int k, int symbols) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<TableList>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{k, symbols}];
  if (!slot) slot = std::make_unique<TableList>(canonical_tables(k, symbols));
  return *slot;
}

class BankEnumerator {
 public:
  BankEnumerator(const TableList& tables, int k, int symbols, int n,
                 const kernels::KernelSet& kern)
      : kern_(kern), n_(n) {
    shape_.k = k;
    shape_.symbols = symbols;
    shape_.lanes = static_cast<int>((tables.size() + 7) / 8 * 8);
    const std::size_t L = shape_.lanes;
    tau_.assign(static_cast<std::size_t>(k) * symbols * L, 0);
    for (std::size_t l = 0; l < L; ++l) {
      const auto& t = tables[l < tables.size() ? l : 0];
      for (int cell = 0; cell < k * symbols; ++cell) tau_[cell * L + l] = t[cell];
    }
    counts_.assign(static_cast<std::size_t>(k) * symbols * L, 0);
    row_.assign(static_cast<std::size_t>(k) * L, 0);
    states_.assign((n + 1) * L, 0);
    ll_.assign((n + 1) * L, 0.0);
    delta_.resize(n + 2);
    for (int c = 0; c <= n + 1; ++c) delta_[c] = xlog2x(c + 1.0) - xlog2x(c);
  }

  void push(int depth, Symbol s) {
    const std::size_t L = shape_.lanes;
    kernels::BankStep st{shape_,          tau_.data(),
                         delta_.data(),   counts_.data(),
                         row_.data(),     states_.data() + depth * L,
                         ll_.data() + depth * L, states_.data() + (depth + 1) * L,
                         ll_.data() + (depth + 1) * L, s};
    kern_.step(st);
  }

  void pop(int depth, Symbol s) {
    kern_.unstep(shape_, counts_.data(), row_.data(), states_.data() + depth * shape_.lanes, s);
  }

  // Sum of 2^{ML} over all completions of the current prefix of length depth.
  double subtree(int depth, std::uint64_t code, std::vector<double>* per_string) {
    if (depth == n_) {
      const double best = kern_.lane_max(ll_.data() + static_cast<std::size_t>(depth) * shape_.lanes,
                                         shape_.lanes);
      const double v = std::min(best, 0.0);
      if (per_string) (*per_string)[code] = v;
      return std::exp2(v);
    }
    double acc = 0.0;
    for (int s = 0; s < shape_.symbols; ++s) {
      push(depth, static_cast<Symbol>(s));
      const double v = subtree(depth + 1, code * shape_.symbols + s, per_string);
      pop(depth, static_cast<Symbol>(s));
      acc = (s == 0) ? v : acc + v;
    }
    return acc;
  }

 private:
  const kernels::KernelSet& kern_;
  int n_;
  kernels::BankShape shape_;
  std::vector<std::int32_t> tau_, counts_, row_, states_;
  std::vector<double> ll_, delta_;
};

}  // namespace

int bank_lanes(int k, int alphabet_size) {
  if (k * alphabet_size * std::log2(static_cast<double>(std::max(k, 1))) > 24.0)
    return std::numeric_limits<int>::max();
  return static_cast<int>(cached_tables(k, alphabet_size).size());
}

std::optional<ComplexityRoute> exact_route(int n, int k, const Alphabet& alphabet,
                                           const ExactEnvelope& env) {
  if (k >= n) return ComplexityRoute::saturated;
  const double log_strings = n * alphabet.log2_size();
  if (log_strings <= env.enumeration_log2_strings + 1e-12) return ComplexityRoute::enumeration;
  const int lanes = bank_lanes(k, alphabet.size);
  if (lanes <= env.bank_max_lanes &&
      log_strings + std::log2(static_cast<double>(lanes)) <= env.bank_log2_work + 1e-12)
    return ComplexityRoute::bank;
  return std::nullopt;
}

double complexity_by_bank(int n, int k, const Alphabet& alphabet, int threads,
                          std::vector<double>* per_string) {
  require(n >= 0 && k >= 1, ErrorCategory::invalid_input, "need n >= 0 and k >= 1");
  const int A = alphabet.size;
  const auto& tables = cached_tables(k, A);
  const auto& kern = kernels::active_kernels();
  if (per_string) per_string->assign(ipow(A, n), 0.0);
  // Split at a fixed depth so the reduction tree is independent of threads.
  const int split = std::min(n, std::max(0, static_cast<int>(std::floor(8.0 / std::log2(A)))));
  const std::uint64_t jobs = ipow(A, split);
  std::vector<double> partial(jobs, 0.0);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    BankEnumerator bank(tables, k, A, n, kern);
    for (std::uint64_t job = begin; job < end; ++job) {
      const auto prefix = decode_string(job, split, A);
      for (int d = 0; d < split; ++d) bank.push(d, prefix[d]);
      partial[job] = bank.subtree(split, job, per_string);
      for (int d = split; d-- > 0;) bank.pop(d, prefix[d]);
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || jobs < 2) {
    work(0, jobs);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (jobs + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t b = std::min(jobs, chunk * t), e = std::min(jobs, chunk * (t + 1));
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return std::log2(prefix_tree_sum(std::move(partial), A));
}

std::shared_ptr<const MlTable> ml_table(const Alphabet& alphabet, int k, int max_len,
                                        int threads) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MlTable>> cache;
  {
    std::lock_guard lock(mu);
    auto it = cache.find({alphabet.size, k});
    if (it != cache.end() && it->second->max_len() >= max_len) return it->second;
  }
  std::shared_ptr<const MlTable> lower;
  if (k > 1) lower = ml_table(alphabet, k - 1, max_len, threads);
  auto built =
      std::make_shared<const MlTable>(build_ml_table(alphabet.size, k, max_len, lower.get(), threads));
  std::lock_guard lock(mu);
  auto& slot = cache[{alphabet.size, k}];
  if (!slot || slot->max_len() < built->max_len()) slot = built;
  return slot;
}

double complexity_by_search(int n, int k, const Alphabet& alphabet, int threads) {
  require(n >= 0 && k >= 1, ErrorCategory::invalid_input, "need n >= 0 and k >= 1");
  if (n == 0) return 0.0;
  auto table = ml_table(alphabet, k, n, threads);
  auto row = table->row(n);
  std::vector<double> probs(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) probs[i] = std::exp2(row[i]);
  return std::log2(prefix_tree_sum(std::move(probs), alphabet.size));
}

double statistical_complexity_exact(int n, int k, const Alphabet& alphabet,
                                    const ExactEnvelope& env, int threads) {
  require(n >= 0 && k >= 1, ErrorCategory::invalid_input, "need n >= 0 and k >= 1");
  const auto route = exact_route(n, k, alphabet, env);
  if (!route)
    fail(ErrorCategory::envelope,
         "exact C(" + std::to_string(n) + "|" + std::to_string(k) + ") for alphabet size " +
             std::to_string(alphabet.size) +
             " is outside the exact envelope; use a band so the cell is bracketed");
  switch (*route) {
    case ComplexityRoute::saturated: return n * alphabet.log2_size();
    case ComplexityRoute::enumeration: return complexity_by_search(n, k, alphabet, threads);
    case ComplexityRoute::bank: return complexity_by_bank(n, k, alphabet, threads);
  }
  return 0.0;
}

double complexity_upper_bound(int n, int k, const Alphabet& alphabet) {
  const double full = n * alphabet.log2_size();
  const double param = (k * alphabet.size + 1.0) * std::log2(k * (n + 1.0));
  return std::min(full, param);
}

double complexity_parameter_bound(int n, int k, const Alphabet& alphabet) {
  const double cells = static_cast<double>(k) * alphabet.size;
  return (cells + 1.0) * std::log2(static_cast<double>(k)) + cells * std::log2(n + 1.0);
}

namespace {

double exact_cell(int n, int k, const Alphabet& alphabet, ComplexityTable& table,
                  const ExactEnvelope& env, int threads) {
  if (k >= n) return n * alphabet.log2_size();
  if (auto e = table.find(alphabet.size, n, k); e && e->mode == CellMode::exact) return e->lo;
  const double c = statistical_complexity_exact(n, k, alphabet, env, threads);
  table.publish({alphabet.size, n, k, CellMode::exact, c, c});
  return c;
}

}  // namespace

Bracket complexity(int n, int k, const Alphabet& alphabet, ComplexityTable& table, int band,
                   const ExactEnvelope& env, int threads) {
  require(band >= 1, ErrorCategory::invalid_input, "band must be >= 1");
  require(n >= 0 && k >= 1, ErrorCategory::invalid_input, "need n >= 0 and k >= 1");
  if (k >= n || k <= band) {
    const double c = exact_cell(n, k, alphabet, table, env, threads);
    return {c, c};
  }
  const double lo = exact_cell(n, band, alphabet, table, env, threads);
  const double hi = std::max(lo, complexity_upper_bound(n, k, alphabet));
  if (auto e = table.find(alphabet.size, n, k); !e)
    table.publish({alphabet.size, n, k, CellMode::bracket, lo, hi});
  return {lo, hi};
}

std::vector<double> ml_profile(std::span<const Symbol> x, int max_order, const Alphabet& alphabet,
                               bool use_tables, const ExactEnvelope& env, int threads) {
  const int n = static_cast<int>(x.size());
  if (use_tables && n * alphabet.log2_size() <= env.enumeration_log2_strings + 1e-12 && n > 0) {
    std::vector<double> out(std::max(max_order, 0), 0.0);
    for (int k = 1; k <= max_order && k < n; ++k) out[k - 1] = ml_table(alphabet, k, n, threads)->lookup(x);
    return out;
  }
  return exact_log_ml_profile(x, max_order, alphabet.size);
}

NmlValue nml_from_ml(double log_ml, const Bracket& c) {
  return {LogProb(log_ml - c.hi), LogProb(log_ml - c.lo)};
}

NmlValue log_nml(std::span<const Symbol> x, int k, const Alphabet& alphabet,
                 ComplexityTable& table, int band, const ExactEnvelope& env) {
  const auto ml = exact_log_ml(x, k, alphabet.size);
  const auto c = complexity(static_cast<int>(x.size()), k, alphabet, table, band, env);
  return nml_from_ml(ml.log_ml.value(), c);
}

}  // namespace unifilar

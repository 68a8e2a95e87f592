#include "unifilar/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "unifilar/error.hpp"

namespace unifilar {

namespace {

constexpr double kTieTolerance = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double xlog2x(double c) { return c > 0.0 ? c * std::log2(c) : 0.0; }

// delta[c] = f(c+1) - f(c) with f(c) = c log2 c, so the plug-in value can be
// updated incrementally as counts grow.
class DeltaTable {
 public:
  explicit DeltaTable(std::size_t n) : d_(n + 1) {
    for (std::size_t c = 0; c <= n; ++c)
      d_[c] = xlog2x(static_cast<double>(c + 1)) - xlog2x(static_cast<double>(c));
  }
  const double* data() const { return d_.data(); }
  std::size_t size() const { return d_.size(); }

 private:
  std::vector<double> d_;
};

const double* delta_for(std::size_t n, std::vector<double>& local) {
  static const DeltaTable shared(1u << 16);
  if (n < shared.size()) return shared.data();
  DeltaTable t(n);
  local.assign(t.data(), t.data() + t.size());
  return local.data();
}

class Searcher {
 public:
  Searcher(std::span<const Symbol> x, int k, int symbols, std::span<const double> suffix,
           const double* delta)
      : x_(x),
        k_(k),
        symbols_(symbols),
        suffix_(suffix),
        delta_(delta),
        tau_(static_cast<std::size_t>(k) * symbols, -1),
        cnt_(static_cast<std::size_t>(k) * symbols, 0),
        row_(k, 0) {
    trail_.reserve(x.size());
  }

  void run(double floor) {
    best_ = std::isfinite(floor) ? floor - 10 * kTieTolerance : kNegInf;
    used_ = 1;
    descend(0, 0, 0.0);
  }

  bool found() const { return found_; }
  std::uint64_t nodes() const { return nodes_; }
  AutomatonSpec best_automaton() const {
    AutomatonSpec a(k_, symbols_, 0);
    a.tau = best_tau_;
    return a;
  }
  CountMatrix best_counts() const {
    CountMatrix c(k_, symbols_);
    c.counts = best_cnt_;
    return c;
  }

 private:
  void descend(std::size_t i, State cur, double ll) {
    const std::size_t mark = trail_.size();
    const std::size_t n = x_.size();
    while (true) {
      ++nodes_;
      const std::size_t idx = static_cast<std::size_t>(cur) * symbols_ + x_[i];
      ll += delta_[cnt_[idx]] - delta_[row_[cur]];
      ++cnt_[idx];
      ++row_[cur];
      trail_.push_back(static_cast<std::int32_t>(idx));
      if (i + 1 == n) {
        if (ll > best_ + kTieTolerance) {
          best_ = ll;
          found_ = true;
          best_tau_ = tau_;
          best_cnt_ = cnt_;
        }
        break;
      }
      if (ll + suffix_[i + 1] <= best_ + kTieTolerance) break;
      const State nxt = tau_[idx];
      if (nxt >= 0) {
        cur = nxt;
        ++i;
        continue;
      }
      const int limit = std::min(used_ + 1, k_);
      for (int j = 0; j < limit; ++j) {
        tau_[idx] = j;
        const bool fresh = (j == used_);
        if (fresh) ++used_;
        descend(i + 1, j, ll);
        if (fresh) --used_;
        if (ll + suffix_[i + 1] <= best_ + kTieTolerance) break;
      }
      tau_[idx] = -1;
      break;
    }
    while (trail_.size() > mark) {
      const auto idx = static_cast<std::size_t>(trail_.back());
      trail_.pop_back();
      --cnt_[idx];
      --row_[idx / symbols_];
    }
  }

  std::span<const Symbol> x_;
  int k_;
  int symbols_;
  std::span<const double> suffix_;
  const double* delta_;
  std::vector<State> tau_;
  std::vector<std::int32_t> cnt_;
  std::vector<std::int32_t> row_;
  std::vector<std::int32_t> trail_;
  int used_ = 1;
  double best_ = kNegInf;
  bool found_ = false;
  std::vector<State> best_tau_;
  std::vector<std::int32_t> best_cnt_;
  std::uint64_t nodes_ = 0;
};

void check_symbols(std::span<const Symbol> x, int alphabet_size) {
  for (Symbol s : x)
    require(s < alphabet_size, ErrorCategory::invalid_input,
            "symbol " + std::to_string(int(s)) + " outside alphabet of size " +
                std::to_string(alphabet_size));
}

}  // namespace

AutomatonSpec::AutomatonSpec(int k_, int symbols_, State start_)
    : k(k_), symbols(symbols_), start(start_), tau(static_cast<std::size_t>(k_) * symbols_, -1) {}

CountMatrix::CountMatrix(int k_, int symbols_)
    : k(k_), symbols(symbols_), counts(static_cast<std::size_t>(k_) * symbols_, 0) {}

std::int64_t CountMatrix::row_total(int a) const {
  std::int64_t t = 0;
  for (int b = 0; b < symbols; ++b) t += at(a, b);
  return t;
}

std::int64_t CountMatrix::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

CountMatrix path_counts(std::span<const Symbol> x, const AutomatonSpec& automaton) {
  check_symbols(x, automaton.symbols);
  require(automaton.start >= 0 && automaton.start < automaton.k, ErrorCategory::invalid_input,
          "start state out of range");
  CountMatrix c(automaton.k, automaton.symbols);
  State y = automaton.start;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++c.at(y, x[i]);
    if (i + 1 == x.size()) break;
    State nxt = automaton.next(y, x[i]);
    require(nxt >= 0, ErrorCategory::invalid_input,
            "automaton has no transition for state " + std::to_string(y) + " on symbol " +
                std::to_string(int(x[i])) + " at position " + std::to_string(i));
    require(nxt < automaton.k, ErrorCategory::invalid_input, "transition target out of range");
    y = nxt;
  }
  return c;
}

LogProb plugin_log_ml(const CountMatrix& counts) {
  std::vector<double> rows;
  rows.reserve(counts.k);
  for (int a = 0; a < counts.k; ++a) {
    const auto na = counts.row_total(a);
    if (na == 0) continue;
    double t = -xlog2x(static_cast<double>(na));
    for (int b = 0; b < counts.symbols; ++b) t += xlog2x(static_cast<double>(counts.at(a, b)));
    rows.push_back(t);
  }
  std::sort(rows.begin(), rows.end());
  double total = 0.0;
  for (double r : rows) total += r;
  return LogProb(std::min(total, 0.0));
}

LogProb plugin_log_ml(std::span<const Symbol> x, const AutomatonSpec& automaton, int k) {
  require(k == automaton.k, ErrorCategory::invalid_input, "automaton order mismatch");
  return plugin_log_ml(path_counts(x, automaton));
}

LogProb optimistic_bound(const CountMatrix& partial, std::size_t /*remaining*/,
                         LogProb suffix_bound) {
  return plugin_log_ml(partial) * suffix_bound;
}

namespace detail {

MlResult search_ml(std::span<const Symbol> x, int k, int alphabet_size,
                   std::span<const double> suffix_ml, double floor, std::uint64_t* nodes_visited) {
  require(k >= 1, ErrorCategory::invalid_input, "order k must be >= 1");
  require(suffix_ml.size() >= x.size() + 1 || x.empty(), ErrorCategory::invalid_input,
          "suffix bound vector too short");
  if (x.empty()) {
    return {LogProb::one(), AutomatonSpec(k, alphabet_size, 0), CountMatrix(k, alphabet_size)};
  }
  std::vector<double> local;
  const double* delta = delta_for(x.size(), local);
  Searcher s(x, k, alphabet_size, suffix_ml, delta);
  s.run(floor);
  if (nodes_visited) *nodes_visited = s.nodes();
  require(s.found(), ErrorCategory::invariant,
          "maximum-likelihood search found no automaton above the supplied floor");
  MlResult r;
  r.argmax = s.best_automaton();
  r.counts = s.best_counts();
  r.log_ml = plugin_log_ml(r.counts);
  return r;
}

std::vector<double> suffix_ml_bounds(std::span<const Symbol> x, int k, int alphabet_size,
                                     std::span<const double> lower_order_suffix) {
  const std::size_t n = x.size();
  std::vector<double> sb(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t m = n - i;
    if (m <= static_cast<std::size_t>(k)) {
      sb[i] = 0.0;
      continue;
    }
    const double floor = lower_order_suffix.empty() ? kNegInf : lower_order_suffix[i];
    if (floor == 0.0) {
      sb[i] = 0.0;
      continue;
    }
    sb[i] = 0.0;
    auto r = search_ml(x.subspan(i), k, alphabet_size, std::span<const double>(sb).subspan(i),
                       floor);
    sb[i] = r.log_ml.value();
  }
  return sb;
}

}  // namespace detail

MlResult exact_log_ml(std::span<const Symbol> x, int k, int alphabet_size) {
  require(k >= 1, ErrorCategory::invalid_input, "order k must be >= 1");
  Alphabet alphabet(alphabet_size);
  check_symbols(x, alphabet.size);
  if (x.empty())
    return {LogProb::one(), AutomatonSpec(k, alphabet_size, 0), CountMatrix(k, alphabet_size)};
  auto sb = detail::suffix_ml_bounds(x.subspan(1), k, alphabet_size);
  std::vector<double> full(x.size() + 1, 0.0);
  std::copy(sb.begin(), sb.end(), full.begin() + 1);
  return detail::search_ml(x, k, alphabet_size, full, kNegInf);
}

std::vector<double> exact_log_ml_profile(std::span<const Symbol> x, int max_order,
                                         int alphabet_size) {
  Alphabet alphabet(alphabet_size);
  check_symbols(x, alphabet.size);
  std::vector<double> out(std::max(max_order, 0), 0.0);
  const std::size_t n = x.size();
  std::vector<double> prev;
  for (int k = 1; k <= max_order; ++k) {
    if (static_cast<std::size_t>(k) >= n || (k > 1 && out[k - 2] == 0.0)) {
      out[k - 1] = 0.0;
      continue;
    }
    auto sb = detail::suffix_ml_bounds(x, k, alphabet_size, prev);
    out[k - 1] = sb[0];
    prev = std::move(sb);
  }
  return out;
}

std::uint64_t string_code(std::span<const Symbol> x, int alphabet_size) {
  std::uint64_t code = 0;
  for (Symbol s : x) code = code * static_cast<std::uint64_t>(alphabet_size) + s;
  return code;
}

SymbolString decode_string(std::uint64_t code, int len, int alphabet_size) {
  SymbolString x(len);
  for (int i = len; i-- > 0;) {
    x[i] = static_cast<Symbol>(code % alphabet_size);
    code /= alphabet_size;
  }
  return x;
}

MlTable::MlTable(int alphabet_size, int k, int max_len)
    : alphabet_size_(alphabet_size), k_(k), max_len_(max_len), by_len_(max_len + 1) {
  std::uint64_t size = 1;
  for (int len = 0; len <= max_len; ++len) {
    by_len_[len].assign(size, 0.0);
    size *= alphabet_size;
  }
}

double MlTable::lookup(std::span<const Symbol> x) const {
  require(static_cast<int>(x.size()) <= max_len_, ErrorCategory::envelope,
          "string longer than the tabulated length");
  return by_len_[x.size()][string_code(x, alphabet_size_)];
}

MlTable build_ml_table(int alphabet_size, int k, int max_len, const MlTable* lower, int threads) {
  require(k >= 1, ErrorCategory::invalid_input, "order k must be >= 1");
  MlTable table(alphabet_size, k, max_len);
  if (lower)
    require(lower->alphabet_size() == alphabet_size && lower->k() == k - 1 &&
                lower->max_len() >= max_len,
            ErrorCategory::invalid_input, "lower-order table does not match");
  threads = std::max(1, threads);
  std::vector<std::uint64_t> pow(max_len + 1, 1);
  for (int i = 1; i <= max_len; ++i) pow[i] = pow[i - 1] * alphabet_size;

  for (int len = 1; len <= max_len; ++len) {
    auto out = table.row(len);
    if (len <= k) continue;  // saturated: all zeros
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
      std::vector<double> sb(len + 1, 0.0);
      for (std::uint64_t code = begin; code < end; ++code) {
        const auto x = decode_string(code, len, alphabet_size);
        for (int i = 1; i < len; ++i) sb[i] = table.row(len - i)[code % pow[len - i]];
        sb[len] = 0.0;
        const double floor = lower ? lower->row(len)[code] : kNegInf;
        if (floor == 0.0) {
          out[code] = 0.0;
          continue;
        }
        out[code] = detail::search_ml(x, k, alphabet_size, sb, floor).log_ml.value();
      }
    };
    const std::uint64_t total = pow[len];
    if (threads == 1 || total < 256) {
      work(0, total);
    } else {
      std::vector<std::thread> pool;
      const std::uint64_t chunk = (total + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::uint64_t b = std::min(total, chunk * t), e = std::min(total, chunk * (t + 1));
        if (b < e) pool.emplace_back(work, b, e);
      }
      for (auto& th : pool) th.join();
    }
  }
  return table;
}

}  // namespace unifilar

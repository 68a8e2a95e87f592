#include "unifilar/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "unifilar/error.hpp"
#include "unifilar/random.hpp"

namespace unifilar {

Alphabet::Alphabet(int s) : size(s) {
  require(s >= 2 && s <= 256, ErrorCategory::invalid_input,
          "alphabet size must be in [2, 256], got " + std::to_string(s));
}

double Alphabet::log2_size() const { return std::log2(static_cast<double>(size)); }

UnifilarModel::UnifilarModel(Alphabet alphabet, std::vector<double> pi, std::vector<State> tau,
                             std::vector<double> epsilon, std::string name)
    : alphabet_(alphabet),
      pi_(std::move(pi)),
      tau_(std::move(tau)),
      epsilon_(std::move(epsilon)),
      name_(std::move(name)) {
  const auto k = pi_.size();
  const auto a = static_cast<std::size_t>(alphabet_.size);
  require(k >= 1, ErrorCategory::invalid_input, "model needs at least one state");
  require(tau_.size() == k * a, ErrorCategory::invalid_input, "tau must be k x |alphabet|");
  require(epsilon_.size() == k * a, ErrorCategory::invalid_input,
          "epsilon must be k x |alphabet|");
  double total = 0.0;
  for (double p : pi_) {
    require(p >= 0.0 && p <= 1.0, ErrorCategory::invalid_input, "pi entries must lie in [0,1]");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCategory::invalid_input, "pi must sum to 1");
  for (std::size_t y = 0; y < k; ++y) {
    double row = 0.0;
    for (std::size_t x = 0; x < a; ++x) {
      double e = epsilon_[y * a + x];
      require(e >= 0.0 && e <= 1.0, ErrorCategory::invalid_input,
              "emission probabilities must lie in [0,1]");
      row += e;
      State t = tau_[y * a + x];
      require(t >= 0 && static_cast<std::size_t>(t) < k, ErrorCategory::invalid_input,
              "tau entry out of range");
    }
    require(std::abs(row - 1.0) <= 1e-12, ErrorCategory::invalid_input,
            "emission row " + std::to_string(y) + " must sum to 1");
  }
}

UnifilarModel UnifilarModel::with_pi(std::vector<double> pi) const {
  return UnifilarModel(alphabet_, std::move(pi), tau_, epsilon_, name_);
}

State UnifilarModel::follow(State start, std::span<const Symbol> x) const {
  State y = start;
  for (Symbol s : x) y = tau(y, s);
  return y;
}

void UnifilarModel::check_string(std::span<const Symbol> x) const {
  for (Symbol s : x)
    require(s < symbols(), ErrorCategory::invalid_input,
            "symbol " + std::to_string(int(s)) + " outside alphabet of size " +
                std::to_string(symbols()));
}

LogProb joint_log_prob(const UnifilarModel& model, std::span<const Symbol> x,
                       std::span<const State> y) {
  require(x.size() == y.size(), ErrorCategory::invalid_input,
          "symbol string and state path differ in length");
  require(!x.empty(), ErrorCategory::invalid_input, "joint probability needs n >= 1");
  model.check_string(x);
  for (State s : y)
    require(s >= 0 && s < model.k(), ErrorCategory::invalid_input, "state out of range");
  LogProb lp = LogProb::from_prob(model.pi(y[0]));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && y[i] != model.tau(y[i - 1], x[i - 1])) return LogProb::zero();
    lp *= LogProb::from_prob(model.epsilon(y[i], x[i]));
    if (lp.is_zero()) return lp;
  }
  return lp;
}

LogProb conditional_log_prob(const UnifilarModel& model, std::span<const Symbol> x, State y1) {
  require(y1 >= 0 && y1 < model.k(), ErrorCategory::invalid_input, "start state out of range");
  model.check_string(x);
  LogProb lp = LogProb::one();
  State y = y1;
  for (Symbol s : x) {
    lp *= LogProb::from_prob(model.epsilon(y, s));
    if (lp.is_zero()) return lp;
    y = model.tau(y, s);
  }
  return lp;
}

LogProb marginal_log_prob(const UnifilarModel& model, std::span<const Symbol> x) {
  model.check_string(x);
  std::vector<double> terms;
  terms.reserve(model.k());
  for (State y = 0; y < model.k(); ++y) {
    if (model.pi(y) <= 0.0) continue;
    terms.push_back(std::log2(model.pi(y)) + conditional_log_prob(model, x, y).value());
  }
  return LogProb(log2_sum_exp2(terms));
}

std::vector<double> state_transition_matrix(const UnifilarModel& model) {
  const int k = model.k();
  std::vector<double> t(static_cast<std::size_t>(k) * k, 0.0);
  for (State y = 0; y < k; ++y)
    for (int x = 0; x < model.symbols(); ++x)
      t[static_cast<std::size_t>(y) * k + model.tau(y, Symbol(x))] += model.epsilon(y, Symbol(x));
  return t;
}

double stationary_residual(const UnifilarModel& model, std::span<const double> pi) {
  const int k = model.k();
  std::vector<double> next(k, 0.0);
  for (State y = 0; y < k; ++y)
    for (int x = 0; x < model.symbols(); ++x)
      next[model.tau(y, Symbol(x))] += pi[y] * model.epsilon(y, Symbol(x));
  double r = 0.0;
  for (int y = 0; y < k; ++y) r += std::abs(next[y] - pi[y]);
  return r;
}

namespace {

// Strongly connected components over positive-probability edges (iterative
// Tarjan, restricted to `active` states).
std::vector<int> scc_labels(const UnifilarModel& model, const std::vector<char>& active,
                            int& count) {
  const int k = model.k();
  std::vector<int> index(k, -1), low(k, 0), label(k, -1);
  std::vector<char> on_stack(k, 0);
  std::vector<int> stack;
  int next_index = 0;
  count = 0;
  struct Frame {
    int v;
    int edge;
  };
  for (int root = 0; root < k; ++root) {
    if (!active[root] || index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < model.symbols()) {
        int x = f.edge++;
        if (model.epsilon(f.v, Symbol(x)) <= 0.0) continue;
        int w = model.tau(f.v, Symbol(x));
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          label[w] = count;
        } while (w != v);
        ++count;
      }
    }
  }
  return label;
}

std::vector<double> solve_dense(const std::vector<double>& t, const std::vector<int>& cls) {
  // Solve pi (T - I) = 0 with sum pi = 1 on the class, replacing the last
  // balance equation by the normalization.
  const std::size_t m = cls.size();
  const std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(t.size())) + 0.5);
  std::vector<double> a(m * (m + 1), 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      // row r: sum_c pi_c T[c][r] - pi_r = 0
      a[r * (m + 1) + c] = t[static_cast<std::size_t>(cls[c]) * k + cls[r]] - (r == c ? 1.0 : 0.0);
    }
  }
  for (std::size_t c = 0; c < m; ++c) a[(m - 1) * (m + 1) + c] = 1.0;
  a[(m - 1) * (m + 1) + m] = 1.0;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r * (m + 1) + col]) > std::abs(a[piv * (m + 1) + col])) piv = r;
    if (piv != col)
      for (std::size_t c = 0; c <= m; ++c) std::swap(a[col * (m + 1) + c], a[piv * (m + 1) + c]);
    double d = a[col * (m + 1) + col];
    if (std::abs(d) < 1e-300) fail(ErrorCategory::non_stationary, "singular balance equations");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = a[r * (m + 1) + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= m; ++c) a[r * (m + 1) + c] -= f * a[col * (m + 1) + c];
    }
  }
  std::vector<double> pi(m);
  for (std::size_t r = 0; r < m; ++r) pi[r] = a[r * (m + 1) + m] / a[r * (m + 1) + r];
  return pi;
}

}  // namespace

std::vector<double> stationary_pi(const UnifilarModel& model, double tol) {
  const int k = model.k();
  std::vector<char> reach(k, 0);
  std::vector<int> todo;
  for (int y = 0; y < k; ++y)
    if (model.pi(y) > 0.0) {
      reach[y] = 1;
      todo.push_back(y);
    }
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int x = 0; x < model.symbols(); ++x) {
      if (model.epsilon(v, Symbol(x)) <= 0.0) continue;
      int w = model.tau(v, Symbol(x));
      if (!reach[w]) {
        reach[w] = 1;
        todo.push_back(w);
      }
    }
  }
  int count = 0;
  auto label = scc_labels(model, reach, count);
  std::vector<char> closed(count, 1);
  for (int v = 0; v < k; ++v) {
    if (!reach[v]) continue;
    for (int x = 0; x < model.symbols(); ++x)
      if (model.epsilon(v, Symbol(x)) > 0.0 && label[model.tau(v, Symbol(x))] != label[v])
        closed[label[v]] = 0;
  }
  std::vector<int> closed_ids;
  for (int c = 0; c < count; ++c)
    if (closed[c]) closed_ids.push_back(c);
  if (closed_ids.size() != 1) {
    std::ostringstream msg;
    msg << "stationary distribution is not unique: " << closed_ids.size()
        << " closed communicating classes reachable from the initial support {";
    for (std::size_t i = 0; i < closed_ids.size(); ++i) {
      msg << (i ? "} {" : "");
      bool first = true;
      for (int v = 0; v < k; ++v)
        if (reach[v] && label[v] == closed_ids[i]) {
          msg << (first ? "" : ",") << v;
          first = false;
        }
    }
    msg << "}";
    fail(ErrorCategory::non_stationary, msg.str());
  }
  std::vector<int> cls;
  for (int v = 0; v < k; ++v)
    if (reach[v] && label[v] == closed_ids[0]) cls.push_back(v);

  const auto t = state_transition_matrix(model);
  std::vector<double> pi(k, 0.0);
  if (cls.size() <= 400) {
    auto sub = solve_dense(t, cls);
    for (std::size_t i = 0; i < cls.size(); ++i) pi[cls[i]] = std::max(0.0, sub[i]);
  } else {
    // Lazy chain (T + I)/2 shares the stationary vector and is aperiodic.
    for (int v : cls) pi[v] = 1.0 / static_cast<double>(cls.size());
    std::vector<double> next(k);
    for (int it = 0; it < 1000000; ++it) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int v : cls)
        for (int x = 0; x < model.symbols(); ++x)
          next[model.tau(v, Symbol(x))] += pi[v] * model.epsilon(v, Symbol(x));
      double diff = 0.0;
      for (int v : cls) {
        double nv = 0.5 * (pi[v] + next[v]);
        diff += std::abs(nv - pi[v]);
        pi[v] = nv;
      }
      if (diff < tol * 1e-2) break;
    }
  }
  double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& p : pi) p /= total;
  double res = stationary_residual(model, pi);
  require(res <= std::max(tol, 1e-12 * k), ErrorCategory::non_stationary,
          "stationary solve did not reach tolerance (residual " + std::to_string(res) + ")");
  return pi;
}

std::pair<SymbolString, StatePath> sample(const UnifilarModel& model, std::size_t n,
                                          std::uint64_t seed) {
  SymbolString x;
  StatePath y;
  if (n == 0) return {x, y};
  x.reserve(n);
  y.reserve(n);
  Rng rng(seed);
  State s = static_cast<State>(rng.categorical(model.pi()));
  std::vector<double> row(model.symbols());
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < model.symbols(); ++a) row[a] = model.epsilon(s, Symbol(a));
    Symbol sym = static_cast<Symbol>(rng.categorical(row));
    y.push_back(s);
    x.push_back(sym);
    s = model.tau(s, sym);
  }
  return {x, y};
}

UnifilarModel bernoulli_model(double p_one, std::string name) {
  return UnifilarModel(Alphabet(2), {1.0}, {0, 0}, {1.0 - p_one, p_one}, std::move(name));
}

UnifilarModel uniform_iid_model(int alphabet_size) {
  std::vector<double> eps(alphabet_size, 1.0 / alphabet_size);
  return UnifilarModel(Alphabet(alphabet_size), {1.0}, std::vector<State>(alphabet_size, 0), eps,
                       "uniform-iid");
}

UnifilarModel golden_mean_model() {
  return UnifilarModel(Alphabet(2), {2.0 / 3.0, 1.0 / 3.0}, {0, 1, 0, 0}, {0.5, 0.5, 1.0, 0.0},
                       "golden-mean");
}

UnifilarModel alternating_phase_model(double flip) {
  return UnifilarModel(Alphabet(2), {0.5, 0.5}, {1, 1, 0, 0},
                       {1.0 - flip, flip, flip, 1.0 - flip}, "alternating-phase");
}

UnifilarModel constant_model() {
  return UnifilarModel(Alphabet(2), {1.0}, {0, 0}, {1.0, 0.0}, "constant");
}

}  // namespace unifilar

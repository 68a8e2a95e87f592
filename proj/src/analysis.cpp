#include "unifilar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "unifilar/error.hpp"

namespace unifilar {

double entropy_rate_unifilar(const UnifilarModel& model) {
  const auto pi = stationary_pi(model);
  double h = 0.0;
  for (int y = 0; y < model.k(); ++y) {
    if (pi[y] == 0.0) continue;
    std::vector<double> row(model.epsilon_table().begin() + y * model.symbols(),
                            model.epsilon_table().begin() + (y + 1) * model.symbols());
    h += pi[y] * entropy_bits(row);
  }
  return h;
}

namespace {

struct BlockWalker {
  const UnifilarModel& model;
  int n;
  std::vector<double> acc;  // acc[m-1] collects -P log P at depth m

  // w[y]: pi(y) P(prefix | y); cur[y]: state reached from y.
  void visit(int depth, const std::vector<double>& w, const std::vector<State>& cur) {
    std::vector<double> w2(w.size());
    std::vector<State> cur2(cur.size());
    for (int s = 0; s < model.symbols(); ++s) {
      double p = 0.0;
      for (std::size_t y = 0; y < w.size(); ++y) {
        w2[y] = w[y] == 0.0 ? 0.0 : w[y] * model.epsilon(cur[y], static_cast<Symbol>(s));
        cur2[y] = model.tau(cur[y], static_cast<Symbol>(s));
        p += w2[y];
      }
      if (p == 0.0) continue;
      acc[depth] -= p * std::log2(p);
      if (depth + 1 < n) visit(depth + 1, w2, cur2);
    }
  }
};

}  // namespace

std::vector<double> block_entropies(const UnifilarModel& model, int n, double max_log2_strings) {
  require(n >= 0, ErrorCategory::invalid_input, "block length must be >= 0");
  require(n * model.alphabet().log2_size() <= max_log2_strings + 1e-12, ErrorCategory::envelope,
          "block entropy of length " + std::to_string(n) + " exceeds the enumeration envelope");
  BlockWalker walker{model, n, std::vector<double>(n, 0.0)};
  if (n == 0) return {};
  std::vector<double> w(model.pi().begin(), model.pi().end());
  std::vector<State> cur(model.k());
  for (int y = 0; y < model.k(); ++y) cur[y] = y;
  walker.visit(0, w, cur);
  return walker.acc;
}

double exact_block_entropy(const UnifilarModel& model, int n, double max_log2_strings) {
  if (n == 0) return 0.0;
  return block_entropies(model, n, max_log2_strings).back();
}

double excess_entropy_partial(const UnifilarModel& model, int n, double max_log2_strings) {
  return exact_block_entropy(model, n, max_log2_strings) - n * entropy_rate_unifilar(model);
}

void ScalingSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].std_error >= 0.0, ErrorCategory::invalid_input, "negative stderr in series");
    if (i > 0)
      require(points[i].n > points[i - 1].n, ErrorCategory::invalid_input,
              "series n values must be strictly increasing");
  }
}

ScalingSeries j_function(const ScalingSeries& series, std::vector<std::string>* notices) {
  series.validate();
  std::map<double, const SeriesPoint*> by_n;
  for (const auto& p : series.points) by_n[p.n] = &p;
  ScalingSeries out{"J(" + series.quantity + ")", series.process, series.mode, {}};
  for (const auto& p : series.points) {
    auto it = by_n.find(2.0 * p.n);
    if (it == by_n.end()) {
      if (notices) notices->push_back("no point at n=" + std::to_string(2.0 * p.n) + ", skipped n=" +
                                      std::to_string(p.n));
      continue;
    }
    const SeriesPoint& q = *it->second;
    out.points.push_back({p.n, 2.0 * p.value - q.value,
                          std::sqrt(4.0 * p.std_error * p.std_error + q.std_error * q.std_error)});
  }
  return out;
}

Interval mixture_mi(std::span<const Symbol> x, const Alphabet& alphabet, ComplexityTable& table,
                    int band, const ExactEnvelope& env) {
  require(!x.empty() && x.size() % 2 == 0, ErrorCategory::invalid_input,
          "mixture MI needs a string of even, nonzero length");
  const std::size_t n = x.size() / 2;
  const auto whole = log_ryabko(x, alphabet, table, band, env);
  const auto left = log_ryabko(x.first(n), alphabet, table, band, env);
  const auto right = log_ryabko(x.subspan(n), alphabet, table, band, env);
  return {whole.lo.value() - left.hi.value() - right.hi.value(),
          whole.hi.value() - left.lo.value() - right.lo.value()};
}

ExponentFit hilberg_exponent(const ScalingSeries& series, double n_min, double n_max) {
  series.validate();
  std::vector<double> xs, ys;
  for (const auto& p : series.points) {
    if (p.n < n_min || p.n > n_max) continue;
    require(p.n > 0.0, ErrorCategory::invalid_input, "series n must be positive");
    xs.push_back(std::log2(p.n));
    ys.push_back(std::log2(std::max(1.0, p.value)));
  }
  require(xs.size() >= 3, ErrorCategory::invalid_input,
          "exponent fit needs at least 3 points in the window");
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  fit.points = static_cast<int>(xs.size());
  fit.n_min = std::pow(2.0, xs.front());
  fit.n_max = std::pow(2.0, xs.back());
  return fit;
}

}  // namespace unifilar

#include "unifilar/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "unifilar/error.hpp"
#include "unifilar/random.hpp"

namespace unifilar {

OracleSource ProcessSpec::source() const {
  return oracle_file.empty() ? OracleSource::seeded(oracle_seed) : OracleSource::from_file(oracle_file);
}

int ProcessSpec::alphabet_size() const {
  switch (kind) {
    case ProcessKind::model: return model->symbols();
    case ProcessKind::oracle: return 3;
    case ProcessKind::santa_fe: return 2;
  }
  return 2;
}

std::string ProcessSpec::describe() const {
  switch (kind) {
    case ProcessKind::model: return "model:" + (model->name().empty() ? "unnamed" : model->name());
    case ProcessKind::oracle: return "oracle:theta=" + std::to_string(theta);
    case ProcessKind::santa_fe: return "santa-fe:alpha=" + std::to_string(alpha);
  }
  return {};
}

SymbolString ProcessSpec::sample(std::size_t n, std::uint64_t seed) const {
  switch (kind) {
    case ProcessKind::model: return unifilar::sample(*model, n, seed).first;
    case ProcessKind::oracle: return oracle_sample({theta, source()}, n, seed);
    case ProcessKind::santa_fe: break;
  }
  fail(ErrorCategory::invalid_input,
       "Santa Fe output is a sequence of (k, bit) pairs, not a symbol string; "
       "use the sample command for it");
}

void ExperimentConfig::validate() const {
  require(trials >= 1, ErrorCategory::invalid_input, "trials must be >= 1");
  require(!n_grid.empty(), ErrorCategory::invalid_input, "n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    require(n_grid[i] >= 1, ErrorCategory::invalid_input, "n grid values must be >= 1");
    if (i > 0)
      require(n_grid[i] > n_grid[i - 1], ErrorCategory::invalid_input, "n grid must be increasing");
  }
  require(band >= 1, ErrorCategory::invalid_input, "band must be >= 1");
  require(threads >= 1, ErrorCategory::invalid_input, "threads must be >= 1");
  if (process.kind == ProcessKind::model)
    require(process.model != nullptr, ErrorCategory::invalid_input, "process model missing");
  if (true_order) require(*true_order >= 1, ErrorCategory::invalid_input, "true order must be >= 1");
}

int ExperimentConfig::band_for(int n) const {
  const Alphabet a(process.alphabet_size());
  if (exact_inside_envelope && n * a.log2_size() <= envelope.enumeration_log2_strings + 1e-12)
    return std::max(band, n - 1);
  return band;
}

std::uint64_t trial_seed(std::uint64_t master, int n, int trial) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(n)),
                     static_cast<std::uint64_t>(trial));
}

bool TrialRow::overestimation_ok() const {
  return freq_over <= w_n + 3.0 * std::sqrt(w_n * (1.0 - w_n) / trials) + 1e-15;
}

bool TrialRow::unbiasedness_ok(int true_order) const {
  return mean_estimate <= true_order + 1.0 / (n + 1.0) + 3.0 * estimate_stderr + 1e-12;
}

std::vector<int> dyadic_grid(int lo, int hi) {
  std::vector<int> out;
  for (int e = lo; e <= hi; ++e) out.push_back(1 << e);
  return out;
}

namespace {

// Runs fn(i) for i in [0, count) on `threads` workers; fn writes only to
// slot i of its own output, so the result does not depend on scheduling.
template <class Fn>
void parallel_for(int count, int threads, Fn fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Moments {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  m.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() > 1) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m.mean) * (v[i] - m.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
    m.stderr_of_mean = std::sqrt(var / static_cast<double>(v.size()));
  }
  return m;
}

// Computes every normalizer the mixture at length n needs, once, so trial
// workers only read the table.
void prewarm(const ExperimentConfig& cfg, ComplexityTable& table, int n) {
  const Alphabet a(cfg.process.alphabet_size());
  for (int k = 1; k < n; ++k) complexity(n, k, a, table, cfg.band_for(n), cfg.envelope, cfg.threads);
}

bool tables_apply(const ExperimentConfig& cfg, int n) {
  const Alphabet a(cfg.process.alphabet_size());
  return n * a.log2_size() <= cfg.envelope.enumeration_log2_strings + 1e-12;
}

}  // namespace

TrialReport run_consistency(const ExperimentConfig& cfg, ComplexityTable& table) {
  cfg.validate();
  const Alphabet a(cfg.process.alphabet_size());
  TrialReport report{cfg.process.describe(), cfg.true_order, cfg.mode, {}};
  for (int n : cfg.n_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool exact = cfg.mode == EstimatorMode::exact;
    const bool use_tables = exact && tables_apply(cfg, n);
    if (exact) {
      prewarm(cfg, table, n);
      if (use_tables)
        for (int k = 1; k < n; ++k) ml_table(a, k, n, cfg.threads);
    }
    std::vector<OrderEstimate> est(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
      const SymbolString x = cfg.process.sample(n, trial_seed(cfg.seed, n, t));
      if (!exact) {
        est[t] = order_estimate_surrogate(x, a);
        return;
      }
      const auto profile = ml_profile(x, n - 1, a, use_tables, cfg.envelope, 1);
      const auto mix = mixture_from_profile(profile, n, a, table, cfg.band_for(n), cfg.envelope, 1);
      est[t] = estimate_from_profile(profile, n, mix);
    });
    TrialRow row;
    row.n = n;
    row.trials = cfg.trials;
    row.w_n = weight(n);
    row.histogram.assign(n, 0);
    std::vector<double> his(cfg.trials);
    int correct = 0, over = 0, indet = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      const auto& e = est[t];
      his[t] = e.hi;
      ++row.histogram[e.hi - 1];
      if (!e.determinate()) ++indet;
      if (cfg.true_order) {
        if (e.determinate() && e.lo == *cfg.true_order) ++correct;
        if (e.hi > *cfg.true_order) ++over;
      }
    }
    const auto mom = moments(his);
    row.mean_estimate = mom.mean;
    row.estimate_stderr = mom.stderr_of_mean;
    row.indeterminate = static_cast<double>(indet) / cfg.trials;
    if (cfg.true_order) {
      row.freq_correct = static_cast<double>(correct) / cfg.trials;
      row.freq_over = static_cast<double>(over) / cfg.trials;
    } else {
      row.freq_correct = row.freq_over = std::nan("");
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(std::move(row));
  }
  return report;
}

ScalingSeries run_universality(const ExperimentConfig& cfg, ComplexityTable& table) {
  cfg.validate();
  require(cfg.process.kind == ProcessKind::model, ErrorCategory::invalid_input,
          "universality needs a model process with a computable entropy rate");
  const Alphabet a(cfg.process.alphabet_size());
  const double h = entropy_rate_unifilar(*cfg.process.model);
  ScalingSeries out{"universality_gap", cfg.process.describe(), "exact", {}};
  for (int n : cfg.n_grid) {
    const bool use_tables = tables_apply(cfg, n);
    prewarm(cfg, table, n);
    std::vector<double> rate(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
      const SymbolString x = cfg.process.sample(n, trial_seed(cfg.seed, n, t));
      const auto profile = ml_profile(x, n - 1, a, use_tables, cfg.envelope, 1);
      const auto mix = mixture_from_profile(profile, n, a, table, cfg.band_for(n), cfg.envelope, 1);
      require(mix.exact(), ErrorCategory::envelope,
              "universality needs exact normalizers at n=" + std::to_string(n));
      rate[t] = -mix.lo.value() / n;
    });
    const auto mom = moments(rate);
    out.points.push_back({static_cast<double>(n), mom.mean - h, mom.stderr_of_mean});
  }
  return out;
}

OracleScalingReport run_oracle_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.process.kind == ProcessKind::oracle, ErrorCategory::invalid_input,
          "oracle scaling needs an oracle process");
  const OracleConfig oc{cfg.process.theta, cfg.process.source()};
  const std::size_t n_max = static_cast<std::size_t>(cfg.n_grid.back());
  const std::size_t points = cfg.n_grid.size();
  std::vector<std::vector<double>> u(points, std::vector<double>(cfg.trials)), m = u, g = u;
  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    const std::uint64_t seed = trial_seed(cfg.seed, static_cast<int>(n_max), t);
    const auto words = parse_blocks(oracle_sample_words(oc, n_max, derive_seed(seed, 0)));
    const auto stats = prefix_statistics(words);
    const SymbolString raw = oracle_sample(oc, n_max, derive_seed(seed, 1));
    for (std::size_t i = 0; i < points; ++i) {
      const std::size_t n = static_cast<std::size_t>(cfg.n_grid[i]);
      u[i][t] = static_cast<double>(stats.u[n - 1]);
      m[i][t] = static_cast<double>(stats.m[n - 1]);
      g[i][t] = static_cast<double>(facts_count(std::span(raw).first(n), oc.source));
    }
  });
  OracleScalingReport r;
  r.theta = cfg.process.theta;
  r.beta = oracle_beta(cfg.process.theta);
  const std::string proc = cfg.process.describe();
  r.u_words = {"E[U_n]", proc, "words", {}};
  r.m_words = {"E[M_n]", proc, "words", {}};
  r.u_facts = {"E[U_g]", proc, "symbols", {}};
  for (std::size_t i = 0; i < points; ++i) {
    const double n = cfg.n_grid[i];
    const auto mu = moments(u[i]), mm = moments(m[i]), mg = moments(g[i]);
    r.u_words.points.push_back({n, mu.mean, mu.stderr_of_mean});
    r.m_words.points.push_back({n, mm.mean, mm.stderr_of_mean});
    r.u_facts.points.push_back({n, mg.mean, mg.stderr_of_mean});
  }
  r.u_fit = hilberg_exponent(r.u_words, cfg.fit_min, cfg.fit_max);
  r.m_fit = hilberg_exponent(r.m_words, cfg.fit_min, cfg.fit_max);
  r.facts_fit = hilberg_exponent(r.u_facts, cfg.fit_min, cfg.fit_max);
  return r;
}

ScalingSeries run_mi_scaling(const ExperimentConfig& cfg, ComplexityTable& table) {
  cfg.validate();
  const Alphabet a(cfg.process.alphabet_size());
  ScalingSeries out{"mixture_mi", cfg.process.describe(), "exact", {}};
  for (int n : cfg.n_grid) {
    require(tables_apply(cfg, 2 * n), ErrorCategory::envelope,
            "mixture MI at n=" + std::to_string(n) + " needs strings of length " +
                std::to_string(2 * n) + " inside the exact envelope");
    prewarm(cfg, table, n);
    prewarm(cfg, table, 2 * n);
    std::vector<double> mi(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int t) {
      const SymbolString x = cfg.process.sample(2 * n, trial_seed(cfg.seed, n, t));
      auto mixture_at = [&](std::span<const Symbol> s) {
        const int len = static_cast<int>(s.size());
        const auto profile = ml_profile(s, len - 1, a, true, cfg.envelope, 1);
        return mixture_from_profile(profile, len, a, table, cfg.band_for(len), cfg.envelope, 1);
      };
      const auto whole = mixture_at(x), left = mixture_at(std::span(x).first(n)),
                 right = mixture_at(std::span(x).subspan(n));
      require(whole.exact() && left.exact() && right.exact(), ErrorCategory::envelope,
              "mixture MI needs exact normalizers");
      mi[t] = whole.lo.value() - left.lo.value() - right.lo.value();
    });
    const auto mom = moments(mi);
    out.points.push_back({static_cast<double>(n), mom.mean, mom.stderr_of_mean});
  }
  return out;
}

}  // namespace unifilar

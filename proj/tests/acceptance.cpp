// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "unifilar/analysis.hpp"
#include "unifilar/estimator.hpp"
#include "unifilar/experiments.hpp"
#include "unifilar/io.hpp"
#include "unifilar/random.hpp"

using namespace unifilar;

namespace {

int failures = 0;

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

void run(int id, const std::string& title, const std::function<void(Check&)>& body,
         double time_limit = 0.0) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0.0) c.expect(secs < time_limit, "runtime under " + std::to_string(time_limit) + " s");
  if (!c.ok) ++failures;
  std::printf("%s %d %s:%s (%.2f s)\n", c.ok ? "PASS" : "FAIL", id, title.c_str(), c.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

SymbolString S(const std::string& s) {
  SymbolString x;
  for (char ch : s) x.push_back(static_cast<Symbol>(ch - '0'));
  return x;
}

SymbolString random_string(Rng& rng, int n, int a) {
  SymbolString x(n);
  for (auto& s : x) s = static_cast<Symbol>(rng.next_u64() % a);
  return x;
}

UnifilarModel random_model(Rng& rng) {
  const int k = 1 + static_cast<int>(rng.next_u64() % 3);
  std::vector<double> pi(k), eps(k * 2);
  std::vector<State> tau(k * 2);
  double total = 0.0;
  for (auto& p : pi) total += (p = 0.1 + rng.uniform());
  for (auto& p : pi) p /= total;
  for (int y = 0; y < k; ++y) {
    const double e = rng.uniform();
    eps[y * 2] = e;
    eps[y * 2 + 1] = 1.0 - e;
    tau[y * 2] = static_cast<State>(rng.next_u64() % k);
    tau[y * 2 + 1] = static_cast<State>(rng.next_u64() % k);
  }
  return UnifilarModel(Alphabet(2), pi, tau, eps, "random");
}

std::string fmt(double v) { return io::format_double(v); }

ExperimentConfig model_config(UnifilarModel m, std::optional<int> order, std::vector<int> grid, int trials,
                              std::uint64_t seed) {
  ExperimentConfig c;
  c.process.kind = ProcessKind::model;
  c.process.model = std::make_shared<const UnifilarModel>(std::move(m));
  c.true_order = order;
  c.n_grid = std::move(grid);
  c.trials = trials;
  c.seed = seed;
  c.band = 2;
  return c;
}

ExperimentConfig oracle_config(double theta) {
  ExperimentConfig c;
  c.process.kind = ProcessKind::oracle;
  c.process.theta = theta;
  c.process.oracle_seed = 7;
  c.n_grid = dyadic_grid(0, 17);
  c.trials = 100;
  c.seed = 11;
  return c;
}

// Serialized results of every experiment, per thread count, for the
// determinism check.
std::vector<std::string> serialized[2];

void record(int slot, const std::string& s) { serialized[slot].push_back(s); }

}  // namespace

int main() {
  const Alphabet bin(2);

  run(1, "golden values", [&](Check& c) {
    ComplexityTable t;
    const double c21 = statistical_complexity_exact(2, 1, bin);
    c.detail << " C(2|1)=" << fmt(c21);
    c.expect(std::abs(c21 - std::log2(2.5)) <= 1e-9, "C(2|1)");
    const double p01 = log_ryabko(S("01"), bin, t, 2).lo.prob();
    const double p00 = log_ryabko(S("00"), bin, t, 2).lo.prob();
    c.detail << " P(01)=" << fmt(p01) << " P(00)=" << fmt(p00);
    c.expect(std::abs(p01 - 0.175) <= 1e-9, "P(01)");
    c.expect(std::abs(p00 - 0.325) <= 1e-9, "P(00)");
    const double want[] = {1.0 / 16.0, 4.0 / 27.0, 1.0};
    for (int k = 1; k <= 3; ++k) {
      const double ml = exact_log_ml(S("0011"), k).log_ml.prob();
      c.detail << " ML(0011|" << k << ")=" << fmt(ml);
      c.expect(std::abs(ml - want[k - 1]) <= 1e-9, "ML(0011)");
    }
    const auto m = order_estimate_exact(S("01"), bin, t, 2);
    c.detail << " M(01)=" << m.hi;
    c.expect(m.determinate() && m.hi == 1, "estimate of 01");
    const auto mi = mixture_mi(S("00"), bin, t, 2);
    c.detail << " MI(00)=" << fmt(mi.lo);
    c.expect(mi.exact() && std::abs(mi.lo - (2.0 + std::log2(0.325))) <= 1e-9, "MI(00)");
  }, 1.0);

  run(2, "normalization", [&](Check& c) {
    Rng rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto m = random_model(rng);
      for (int n = 1; n <= 8; ++n) {
        std::vector<double> p;
        for (std::uint64_t code = 0; code < (1u << n); ++code)
          p.push_back(marginal_log_prob(m, oracle::decode(code, n, 2)).prob());
        worst = std::max(worst, std::abs(pairwise_sum(p) - 1.0));
      }
    }
    c.detail << " marginal=" << fmt(worst);
    c.expect(worst <= 1e-9, "marginal sums");
    ComplexityTable table;
    double nml_worst = 0.0, mix_worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
      std::vector<double> mix;
      std::vector<std::vector<double>> nml(3);
      for (std::uint64_t code = 0; code < (1u << n); ++code) {
        const auto x = oracle::decode(code, n, 2);
        mix.push_back(log_ryabko(x, bin, table, 16).lo.prob());
        for (int k = 1; k <= 3; ++k) nml[k - 1].push_back(log_nml(x, k, bin, table, 16).lo.prob());
      }
      mix_worst = std::max(mix_worst, std::abs(pairwise_sum(mix) - 1.0));
      for (const auto& v : nml) nml_worst = std::max(nml_worst, std::abs(pairwise_sum(v) - 1.0));
    }
    c.detail << " nml=" << fmt(nml_worst) << " mixture=" << fmt(mix_worst);
    c.expect(nml_worst <= 1e-9, "NML sums");
    c.expect(mix_worst <= 1e-9, "mixture sums");
  }, 120.0);

  run(3, "inequalities", [&](Check& c) {
    Rng rng(31);
    ComplexityTable table;
    int cases = 0, bad_sandwich = 0, bad_sub = 0, bad_ml = 0, bad_est = 0, bad_c = 0;
    for (int t = 0; t < 1200; ++t) {
      const int n = 1 + static_cast<int>(rng.next_u64() % 10);
      const auto x = random_string(rng, n, 2);
      ++cases;
      if (sandwich_check(x, bin, table, 16).min_slack() < -1e-9) ++bad_sandwich;
      const auto prof = exact_log_ml_profile(x, 4);
      for (int k = 1; k < 4; ++k)
        if (prof[k] < prof[k - 1] - 1e-9) ++bad_ml;
      if (n >= 2) {
        const std::size_t cut = 1 + rng.next_u64() % (n - 1);
        const std::span<const Symbol> all(x);
        for (int k = 1; k <= 3; ++k) {
          const double whole = exact_log_ml(all, k).log_ml.value();
          const double parts = exact_log_ml(all.first(cut), k).log_ml.value() +
                               exact_log_ml(all.subspan(cut), k).log_ml.value();
          if (whole > parts + 1e-9) ++bad_sub;
        }
      }
      const auto e = order_estimate_exact(x, bin, table, 16);
      if (e.hi > n) ++bad_est;
    }
    for (int n = 1; n <= 12; ++n) {
      double prev = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double cc = statistical_complexity_exact(n, k, bin);
        ++cases;
        if (cc < prev - 1e-9 || cc > complexity_upper_bound(n, k, bin) + 1e-9 ||
            cc > complexity_parameter_bound(n, k, bin) + 1e-9)
          ++bad_c;
        prev = cc;
      }
    }
    c.detail << " cases=" << cases << " sandwich=" << bad_sandwich << " subadditive=" << bad_sub
             << " ml_monotone=" << bad_ml << " complexity=" << bad_c << " estimate=" << bad_est;
    c.expect(cases >= 1000, "case count");
    c.expect(bad_sandwich + bad_sub + bad_ml + bad_c + bad_est == 0, "violations");
  });

  run(4, "search equals naive enumeration", [&](Check& c) {
    Rng rng(404);
    int mismatches = 0, compared = 0;
    for (int t = 0; t < 200; ++t) {
      const int a = t % 4 == 3 ? 3 : 2;
      const auto x = random_string(rng, 1 + static_cast<int>(rng.next_u64() % 8), a);
      for (int k = 1; k <= 3; ++k) {
        const auto r = exact_log_ml(x, k, a);
        std::vector<int> counts(r.counts.counts.begin(), r.counts.counts.end());
        const auto got = oracle::fraction_from_counts(counts, r.counts.k, r.counts.symbols);
        const auto naive = oracle::naive_ml(x, k, a);
        ++compared;
        if (!got.same(naive) || std::abs(r.log_ml.value() - naive.log2()) > 1e-12) ++mismatches;
      }
    }
    c.detail << " compared=" << compared << " mismatches=" << mismatches;
    c.expect(mismatches == 0, "exact agreement");
  });

  ComplexityTable table;
  for (int slot = 0; slot < 2; ++slot) {
    const int threads = slot == 0 ? 1 : 4;
    const bool report = slot == 0;
    const std::string tag = report ? "" : " (threads=4 rerun)";

    auto iid = model_config(uniform_iid_model(2), 1, {12}, 10000, 3);
    iid.threads = threads;
    auto run5 = [&](Check& c) {
      const auto r = run_consistency(iid, table);
      record(slot, io::trial_to_json(r).dump());
      const auto& row = r.rows.at(0);
      const double bound = 1.0 / 156.0 + 3.0 * std::sqrt((1.0 / 156.0) / 1e4);
      c.detail << " freq_over=" << fmt(row.freq_over) << " bound=" << fmt(bound)
               << " indeterminate=" << fmt(row.indeterminate);
      c.expect(row.freq_over <= bound, "overestimation frequency");
    };

    auto alt = model_config(alternating_phase_model(0.05), 2, {12, 24}, 200, 5);
    alt.threads = threads;
    auto alt_s = model_config(alternating_phase_model(0.05), 2, {2000}, 200, 5);
    alt_s.mode = EstimatorMode::surrogate;
    alt_s.threads = threads;
    auto run6 = [&](Check& c) {
      const auto r = run_consistency(alt, table);
      const auto s = run_consistency(alt_s, table);
      record(slot, io::trial_to_json(r).dump());
      record(slot, io::trial_to_json(s).dump());
      const double f12 = r.rows.at(0).freq_correct, f24 = r.rows.at(1).freq_correct;
      const double fs = s.rows.at(0).freq_correct;
      c.detail << " freq(n=12)=" << fmt(f12) << " freq(n=24)=" << fmt(f24) << " surrogate(n=2000)=" << fmt(fs);
      c.expect(f24 > f12, "frequency increases");
      c.expect(fs >= 0.9, "surrogate frequency");
      // Golden recorded on the first verified run.
      c.expect(fs == 1.0, "surrogate golden 1.0");
      for (const auto* rep : {&r, &s})
        for (const auto& row : rep->rows) {
          c.detail << " mean(n=" << row.n << ")=" << fmt(row.mean_estimate);
          c.expect(row.unbiasedness_ok(2), "mean bound at n=" + std::to_string(row.n));
        }
    };

    auto bern = model_config(bernoulli_model(0.2), std::nullopt, {4, 8, 12}, 1000, 3);
    bern.threads = threads;
    auto run7 = [&](Check& c) {
      const auto s = run_universality(bern, table);
      record(slot, io::series_to_json(s).dump());
      for (const auto& p : s.points) {
        c.detail << " gap(" << p.n << ")=" << fmt(p.value);
        c.expect(p.value > 0.0, "positive gap");
      }
      c.expect(s.points.at(2).value < s.points.at(0).value, "gap(12) < gap(4)");
    };

    auto run9 = [&](Check& c) {
      for (double theta : {0.5, 0.25}) {
        auto cfg = oracle_config(theta);
        cfg.threads = threads;
        const auto r = run_oracle_scaling(cfg);
        record(slot, io::oracle_scaling_to_json(r).dump());
        c.detail << " theta=" << theta << ": beta=" << fmt(r.beta) << " U=" << fmt(r.u_fit.exponent)
                 << " M=" << fmt(r.m_fit.exponent) << " facts=" << fmt(r.facts_fit.exponent);
        c.expect(std::abs(r.u_fit.exponent - r.beta) <= 0.1, "U_n exponent");
        c.expect(std::abs(r.m_fit.exponent - r.beta) <= 0.15, "M_n exponent");
      }
    };

    if (report) {
      run(5, "overestimation bound", run5, 900.0);
      run(6, "consistency trend and unbiasedness", run6);
      run(7, "universality", run7);
    } else {
      Check sink;
      run5(sink);
      run6(sink);
      run7(sink);
    }

    if (report) {
      run(8, "oracle closed forms", [&](Check& c) {
        const double h = oracle_entropy_rate(0.5);
        c.detail << " h(1/2)=" << fmt(h);
        c.expect(h == 1.0, "closed form equals 1");
        const double lumped = entropy_rate_unifilar(oracle_lumped_model(0.5, 40));
        const double words = entropy_rate_unifilar(oracle_word_model(0.5, 8, OracleSource::seeded(7)));
        c.detail << " truncated=" << fmt(lumped) << "," << fmt(words);
        c.expect(std::abs(lumped - h) <= 1e-6 && std::abs(words - h) <= 1e-6, "truncated evaluation");
        const OracleConfig cfg{0.5, OracleSource::seeded(7)};
        double mean = 0.0;
        const int reps = 20;
        for (int i = 0; i < reps; ++i)
          mean += -oracle_realize(cfg, 100000, derive_seed(99, i)).path_log2_prob / 100000.0;
        mean /= reps;
        c.detail << " path_mean=" << fmt(mean);
        c.expect(std::abs(mean - h) <= 0.01, "empirical path rate");
        double mass = 0.0;
        for (int l = 0; l <= 40; ++l)
          mass += std::ldexp(oracle_stationary_pi(0.5, {false, SymbolString(l, 0)}) +
                                 oracle_stationary_pi(0.5, {true, SymbolString(l, 0)}),
                             l);
        c.detail << " mass(40)=" << fmt(mass);
        c.expect(std::abs(mass - 1.0) <= 1e-9, "stationary mass");
      });
      run(9, "oracle scaling law", run9);
    } else {
      Check sink;
      run9(sink);
    }

    auto mi = model_config(uniform_iid_model(2), std::nullopt, {1, 2, 3, 4, 5, 6, 7}, 200, 3);
    mi.threads = threads;
    record(slot, io::series_to_json(run_mi_scaling(mi, table)).dump());
  }

  run(10, "determinism across thread counts", [&](Check& c) {
    c.detail << " experiments=" << serialized[0].size();
    c.expect(serialized[0].size() == serialized[1].size(), "same number of outputs");
    for (std::size_t i = 0; i < std::min(serialized[0].size(), serialized[1].size()); ++i)
      c.expect(serialized[0][i] == serialized[1][i], "output " + std::to_string(i) + " identical");
  });

  return failures == 0 ? 0 : 1;
}

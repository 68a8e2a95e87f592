#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "unifilar/error.hpp"
#include "unifilar/experiments.hpp"
#include "unifilar/io.hpp"

using namespace unifilar;

namespace {

ExperimentConfig model_run(UnifilarModel m, std::vector<int> grid, int trials) {
  ExperimentConfig c;
  c.process.model = std::make_shared<const UnifilarModel>(std::move(m));
  c.n_grid = std::move(grid);
  c.trials = trials;
  c.seed = 21;
  return c;
}

}  // namespace

TEST_CASE("trial seeds and grids") {
  CHECK(trial_seed(1, 8, 3) == trial_seed(1, 8, 3));
  CHECK(trial_seed(1, 8, 3) != trial_seed(1, 8, 4));
  CHECK(trial_seed(1, 8, 3) != trial_seed(1, 16, 3));
  CHECK(trial_seed(1, 8, 3) != trial_seed(2, 8, 3));
  CHECK(dyadic_grid(0, 3) == std::vector<int>{1, 2, 4, 8});
}

TEST_CASE("config validation and band widening") {
  auto c = model_run(golden_mean_model(), {4, 8}, 5);
  CHECK_NOTHROW(c.validate());
  CHECK(c.band_for(8) == 7);
  CHECK(c.band_for(20) == 2);
  c.exact_inside_envelope = false;
  CHECK(c.band_for(8) == 2);
  c.n_grid = {8, 4};
  CHECK_THROWS_AS(c.validate(), Error);
  c.n_grid = {4};
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  ExperimentConfig none;
  none.n_grid = {4};
  CHECK_THROWS_AS(none.validate(), Error);
}

TEST_CASE("report bounds") {
  TrialRow r;
  r.n = 12;
  r.trials = 10000;
  r.w_n = 1.0 / 156.0;
  r.freq_over = 0.0088;
  CHECK(r.overestimation_ok());
  r.freq_over = 0.0090;
  CHECK_FALSE(r.overestimation_ok());
  r.mean_estimate = 2.05;
  r.estimate_stderr = 0.01;
  CHECK(r.unbiasedness_ok(2));
  r.mean_estimate = 2.2;
  CHECK_FALSE(r.unbiasedness_ok(2));
}

TEST_CASE("consistency runs are reproducible across thread counts") {
  auto c = model_run(golden_mean_model(), {4, 8, 16}, 40);
  c.true_order = 2;
  ComplexityTable t1, t3;
  const auto a = run_consistency(c, t1);
  c.threads = 3;
  const auto b = run_consistency(c, t3);
  CHECK(io::trial_to_json(a) == io::trial_to_json(b));
  REQUIRE(a.rows.size() == 3);
  for (const auto& row : a.rows) {
    int total = 0;
    for (int h : row.histogram) total += h;
    CHECK(total == 40);
    CHECK(row.freq_correct <= 1.0 - row.freq_over + 1e-12);
  }

  c.true_order.reset();
  ComplexityTable t;
  const auto open = run_consistency(c, t);
  CHECK(std::isnan(open.rows[0].freq_correct));
}

TEST_CASE("mixture MI series tracks the exhaustive expectation") {
  // Exhaustive expectation of the mixture MI under the uniform source.
  ComplexityTable t;
  const Alphabet bin(2);
  auto c = model_run(uniform_iid_model(2), {1, 2, 3}, 400);
  const auto s = run_mi_scaling(c, t);
  REQUIRE(s.points.size() == 3);
  for (const auto& p : s.points) {
    const int len = 2 * static_cast<int>(p.n);
    double mean = 0.0;
    for (std::uint64_t code = 0; code < (1u << len); ++code)
      mean += mixture_mi(oracle::decode(code, len, 2), bin, t, 16).lo;
    mean /= static_cast<double>(1u << len);
    CHECK(std::abs(p.value - mean) <= 4.0 * p.std_error);
    if (p.n == 1) CHECK(mean == doctest::Approx((std::log2(0.325) + std::log2(0.175)) / 2 + 2.0));
  }
  c.n_grid = {8};
  CHECK_THROWS_AS(run_mi_scaling(c, t), Error);
}

TEST_CASE("universality gap shrinks") {
  auto c = model_run(bernoulli_model(0.2), {2, 10}, 300);
  ComplexityTable t;
  const auto s = run_universality(c, t);
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[0].value > s.points[1].value);
  CHECK(s.points[1].value > 0.0);
}

TEST_CASE("oracle scaling report shape") {
  ExperimentConfig c;
  c.process.kind = ProcessKind::oracle;
  c.process.theta = 0.5;
  c.n_grid = dyadic_grid(0, 9);
  c.trials = 10;
  c.fit_min = 8;
  c.fit_max = 512;
  const auto r = run_oracle_scaling(c);
  CHECK(r.beta == 0.5);
  CHECK(r.u_words.points.size() == 10);
  CHECK(r.u_fit.points == 7);
  for (std::size_t i = 1; i < r.m_words.points.size(); ++i)
    CHECK(r.m_words.points[i].value >= r.m_words.points[i - 1].value);
}

TEST_CASE("Santa Fe is sampled but not run through order experiments") {
  ProcessSpec p;
  p.kind = ProcessKind::santa_fe;
  CHECK_THROWS_AS(p.sample(10, 1), Error);
}

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "unifilar/analysis.hpp"
#include "unifilar/estimator.hpp"
#include "unifilar/processes.hpp"

namespace unifilar {

enum class ProcessKind { model, oracle, santa_fe };

struct ProcessSpec {
  ProcessKind kind = ProcessKind::model;
  std::shared_ptr<const UnifilarModel> model;  // kind == model
  double theta = 0.5;                          // kind == oracle
  double alpha = 2.0;                          // kind == santa_fe
  std::uint64_t oracle_seed = 0;
  std::string oracle_file;  // overrides oracle_seed when set

  OracleSource source() const;
  int alphabet_size() const;
  std::string describe() const;
  SymbolString sample(std::size_t n, std::uint64_t seed) const;
};

struct ExperimentConfig {
  ProcessSpec process;
  std::optional<int> true_order;  // declared by the scenario author
  std::vector<int> n_grid;
  int trials = 100;
  std::uint64_t seed = 1;
  EstimatorMode mode = EstimatorMode::exact;
  int band = 2;
  /// Cells inside the enumeration envelope are computed exactly whatever the
  /// band, since they are cheap there.
  bool exact_inside_envelope = true;
  int threads = 1;
  ExactEnvelope envelope;
  double fit_min = 256.0;
  double fit_max = 131072.0;
  std::string output;  // report path; empty for stdout

  void validate() const;
  int band_for(int n) const;
};

/// Seed of trial `trial` at grid point `n`.
std::uint64_t trial_seed(std::uint64_t master, int n, int trial);

struct TrialRow {
  int n = 0;
  int trials = 0;
  double freq_correct = 0.0;  // determinate and equal to the true order
  double freq_over = 0.0;     // upper end above the true order
  double w_n = 0.0;
  double mean_estimate = 0.0;  // of the upper end
  double estimate_stderr = 0.0;
  double indeterminate = 0.0;
  std::vector<int> histogram;  // histogram[k-1]: trials whose upper end is k
  double wall_seconds = 0.0;   // not part of serialized reports

  /// freq_over <= w_n + 3 sqrt(w_n (1 - w_n) / trials)
  bool overestimation_ok() const;
  /// mean <= M + 1/(n+1) + 3 stderr
  bool unbiasedness_ok(int true_order) const;
};

struct TrialReport {
  std::string process;
  std::optional<int> true_order;
  EstimatorMode mode = EstimatorMode::exact;
  std::vector<TrialRow> rows;
};

TrialReport run_consistency(const ExperimentConfig& cfg, ComplexityTable& table);

/// Mean of -(1/n) log2 P(X_1^n) minus the entropy rate, per n.
ScalingSeries run_universality(const ExperimentConfig& cfg, ComplexityTable& table);

struct OracleScalingReport {
  double theta = 0.5;
  double beta = 0.5;
  ScalingSeries u_words;   // E U_n, n = number of words
  ScalingSeries m_words;   // E M_n, n = number of words
  ScalingSeries u_facts;   // E U_g, n = string length
  ExponentFit u_fit;
  ExponentFit m_fit;
  ExponentFit facts_fit;
};

OracleScalingReport run_oracle_scaling(const ExperimentConfig& cfg);

/// Mean mixture MI over strings of length 2n, per n.
ScalingSeries run_mi_scaling(const ExperimentConfig& cfg, ComplexityTable& table);

/// Dyadic grid 2^lo .. 2^hi.
std::vector<int> dyadic_grid(int lo, int hi);

}  // namespace unifilar

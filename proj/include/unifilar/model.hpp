#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unifilar/logprob.hpp"

namespace unifilar {

using Symbol = std::uint8_t;
using State = std::int32_t;

/// Symbols of a string are indices 0..alphabet_size-1.
using SymbolString = std::vector<Symbol>;
/// Hidden states are indices 0..k-1.
using StatePath = std::vector<State>;

struct Alphabet {
  int size = 2;

  explicit Alphabet(int s = 2);
  double log2_size() const;
  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

/// A unifilar hidden Markov model (k, pi, tau, epsilon). The next state is
/// tau(state, symbol); emissions depend on the current state only.
class UnifilarModel {
 public:
  UnifilarModel(Alphabet alphabet, std::vector<double> pi, std::vector<State> tau,
                std::vector<double> epsilon, std::string name = {});

  const Alphabet& alphabet() const { return alphabet_; }
  int k() const { return static_cast<int>(pi_.size()); }
  int symbols() const { return alphabet_.size; }
  const std::string& name() const { return name_; }

  std::span<const double> pi() const { return pi_; }
  double pi(State y) const { return pi_[y]; }
  State tau(State y, Symbol x) const { return tau_[static_cast<std::size_t>(y) * symbols() + x]; }
  double epsilon(State y, Symbol x) const {
    return epsilon_[static_cast<std::size_t>(y) * symbols() + x];
  }
  std::span<const State> tau_table() const { return tau_; }
  std::span<const double> epsilon_table() const { return epsilon_; }

  /// Same structure with a different initial distribution.
  UnifilarModel with_pi(std::vector<double> pi) const;

  /// State reached from `start` after consuming `x`.
  State follow(State start, std::span<const Symbol> x) const;

  void check_string(std::span<const Symbol> x) const;

 private:
  Alphabet alphabet_;
  std::vector<double> pi_;
  std::vector<State> tau_;
  std::vector<double> epsilon_;
  std::string name_;
};

LogProb joint_log_prob(const UnifilarModel& model, std::span<const Symbol> x,
                       std::span<const State> y);

/// log2 P(x | start state y1): unifilarity collapses the sum over later states
/// to the single path driven by tau.
LogProb conditional_log_prob(const UnifilarModel& model, std::span<const Symbol> x, State y1);

LogProb marginal_log_prob(const UnifilarModel& model, std::span<const Symbol> x);

/// Transition matrix of the induced state chain, row-major k x k.
std::vector<double> state_transition_matrix(const UnifilarModel& model);

/// Stationary distribution on the component reachable from the support of
/// pi. Throws non_stationary when more than one closed class is reachable.
std::vector<double> stationary_pi(const UnifilarModel& model, double tol = 1e-12);

/// L1 residual |pi T - pi| of a candidate stationary vector.
double stationary_residual(const UnifilarModel& model, std::span<const double> pi);

std::pair<SymbolString, StatePath> sample(const UnifilarModel& model, std::size_t n,
                                          std::uint64_t seed);

// Small reference sources used by tests and experiment scenarios.
UnifilarModel bernoulli_model(double p_one, std::string name = "bernoulli");
UnifilarModel uniform_iid_model(int alphabet_size = 2);
/// State A emits 0/1 equiprobably (1 -> B); B emits 0 surely and returns to A.
UnifilarModel golden_mean_model();
/// Two states alternating deterministically on every symbol; A emits 0 with
/// probability 1-flip, B emits 1 with probability 1-flip. Stationary start.
UnifilarModel alternating_phase_model(double flip = 0.0);
/// Single state emitting symbol 0 surely.
UnifilarModel constant_model();

}  // namespace unifilar

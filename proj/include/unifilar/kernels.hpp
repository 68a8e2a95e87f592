#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "unifilar/model.hpp"

namespace unifilar::kernels {

// A bank is a structure-of-arrays set of full transition tables evaluated in
// lock step on one string. Lane l of every array belongs to automaton l.
// Index layout: tau[(state * symbols + symbol) * lanes + l], likewise for
// counts; row totals at row[state * lanes + l]. `lanes` is a multiple of 8.
struct BankShape {
  int k = 1;
  int symbols = 2;
  int lanes = 8;
};

struct BankStep {
  BankShape shape;
  const std::int32_t* tau;
  const double* delta;  // delta[c] = (c+1) log2 (c+1) - c log2 c
  std::int32_t* counts;
  std::int32_t* row;
  const std::int32_t* state_in;
  const double* ll_in;
  std::int32_t* state_out;
  double* ll_out;
  Symbol symbol;
};

// Emit `symbol` from every lane's current state: counts and row totals are
// incremented in place, the log-likelihood and state written to *_out.
void bank_step_scalar(const BankStep& s);
// Undo a step given the pre-step states.
void bank_unstep_scalar(const BankShape& shape, std::int32_t* counts, std::int32_t* row,
                        const std::int32_t* state_before, Symbol symbol);
double lane_max_scalar(const double* v, int lanes);

#if defined(UNIFILAR_BUILD_AVX2)
void bank_step_avx2(const BankStep& s);
void bank_unstep_avx2(const BankShape& shape, std::int32_t* counts, std::int32_t* row,
                      const std::int32_t* state_before, Symbol symbol);
double lane_max_avx2(const double* v, int lanes);
#endif

enum class Isa { scalar, avx2 };

struct KernelSet {
  Isa isa;
  void (*step)(const BankStep&);
  void (*unstep)(const BankShape&, std::int32_t*, std::int32_t*, const std::int32_t*, Symbol);
  double (*lane_max)(const double*, int);
};

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();

/// Best kernel set for this CPU unless overridden by set_preferred_isa or the
/// UNIFILAR_ISA environment variable ("scalar" or "avx2").
const KernelSet& active_kernels();
const KernelSet& kernels_for(Isa isa);
void set_preferred_isa(Isa isa);

}  // namespace unifilar::kernels

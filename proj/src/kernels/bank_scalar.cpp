#include <algorithm>
#include <limits>

#include "unifilar/kernels.hpp"

namespace unifilar::kernels {

void bank_step_scalar(const BankStep& s) {
  const int lanes = s.shape.lanes;
  const int symbols = s.shape.symbols;
  for (int l = 0; l < lanes; ++l) {
    const int st = s.state_in[l];
    const std::size_t cell = static_cast<std::size_t>(st * symbols + s.symbol) * lanes + l;
    const std::size_t rcell = static_cast<std::size_t>(st) * lanes + l;
    const std::int32_t c = s.counts[cell];
    const std::int32_t m = s.row[rcell];
    s.ll_out[l] = s.ll_in[l] + (s.delta[c] - s.delta[m]);
    s.counts[cell] = c + 1;
    s.row[rcell] = m + 1;
    s.state_out[l] = s.tau[cell];
  }
}

void bank_unstep_scalar(const BankShape& shape, std::int32_t* counts, std::int32_t* row,
                        const std::int32_t* state_before, Symbol symbol) {
  const int lanes = shape.lanes;
  for (int l = 0; l < lanes; ++l) {
    const int st = state_before[l];
    --counts[static_cast<std::size_t>(st * shape.symbols + symbol) * lanes + l];
    --row[static_cast<std::size_t>(st) * lanes + l];
  }
}

double lane_max_scalar(const double* v, int lanes) {
  double m = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < lanes; ++l) m = std::max(m, v[l]);
  return m;
}

}  // namespace unifilar::kernels

#include <cmath>
#include <cstring>

#include "doctest.h"
#include "unifilar/kernels.hpp"
#include "unifilar/nml.hpp"
#include "unifilar/random.hpp"

using namespace unifilar;
using namespace unifilar::kernels;

namespace {

struct Bank {
  BankShape shape;
  std::vector<std::int32_t> tau, counts, row, state_in, state_out;
  std::vector<double> ll_in, ll_out, delta;
};

Bank random_bank(Rng& rng, int k, int a, int lanes) {
  Bank b;
  b.shape = {k, a, lanes};
  const std::size_t cells = static_cast<std::size_t>(k) * a * lanes;
  b.tau.resize(cells);
  b.counts.resize(cells);
  for (auto& t : b.tau) t = static_cast<std::int32_t>(rng.next_u64() % k);
  for (auto& c : b.counts) c = static_cast<std::int32_t>(rng.next_u64() % 20);
  b.row.assign(static_cast<std::size_t>(k) * lanes, 0);
  for (int y = 0; y < k; ++y)
    for (int x = 0; x < a; ++x)
      for (int l = 0; l < lanes; ++l) b.row[y * lanes + l] += b.counts[(y * a + x) * lanes + l];
  b.state_in.resize(lanes);
  for (auto& s : b.state_in) s = static_cast<std::int32_t>(rng.next_u64() % k);
  b.ll_in.resize(lanes);
  for (auto& v : b.ll_in) v = -20.0 * rng.uniform();
  b.state_out.assign(lanes, -1);
  b.ll_out.assign(lanes, 0.0);
  for (int c = 0; c < 200; ++c)
    b.delta.push_back((c + 1) * std::log2(c + 1.0) - (c > 0 ? c * std::log2(double(c)) : 0.0));
  return b;
}

BankStep step_of(Bank& b, Symbol s) {
  return {b.shape,           b.tau.data(),       b.delta.data(), b.counts.data(), b.row.data(),
          b.state_in.data(), b.ll_in.data(),     b.state_out.data(), b.ll_out.data(), s};
}

}  // namespace

TEST_CASE("scalar kernel step and undo") {
  Rng rng(1);
  Bank b = random_bank(rng, 3, 2, 16);
  const Bank before = b;
  bank_step_scalar(step_of(b, 1));
  for (int l = 0; l < 16; ++l) {
    const int y = before.state_in[l];
    const int c = before.counts[(y * 2 + 1) * 16 + l], m = before.row[y * 16 + l];
    CHECK(b.ll_out[l] == before.ll_in[l] + (before.delta[c] - before.delta[m]));
    CHECK(b.state_out[l] == before.tau[(y * 2 + 1) * 16 + l]);
  }
  bank_unstep_scalar(b.shape, b.counts.data(), b.row.data(), b.state_in.data(), 1);
  CHECK(b.counts == before.counts);
  CHECK(b.row == before.row);
}

TEST_CASE("vector kernels are bit-identical to the scalar reference") {
  if (!isa_supported(Isa::avx2)) {
    MESSAGE("AVX2 not available; equivalence not exercised");
    return;
  }
  const auto& simd = kernels_for(Isa::avx2);
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng.next_u64() % 4);
    const int a = 2 + static_cast<int>(rng.next_u64() % 3);
    const int lanes = 8 * (1 + static_cast<int>(rng.next_u64() % 6));
    Bank x = random_bank(rng, k, a, lanes);
    Bank y = x;
    const Symbol s = static_cast<Symbol>(rng.next_u64() % a);
    bank_step_scalar(step_of(x, s));
    simd.step(step_of(y, s));
    CHECK(std::memcmp(x.ll_out.data(), y.ll_out.data(), lanes * sizeof(double)) == 0);
    CHECK(x.state_out == y.state_out);
    CHECK(x.counts == y.counts);
    CHECK(x.row == y.row);
    CHECK(lane_max_scalar(x.ll_out.data(), lanes) == simd.lane_max(y.ll_out.data(), lanes));
    bank_unstep_scalar(x.shape, x.counts.data(), x.row.data(), x.state_in.data(), s);
    simd.unstep(y.shape, y.counts.data(), y.row.data(), y.state_in.data(), s);
    CHECK(x.counts == y.counts);
    CHECK(x.row == y.row);
  }
}

TEST_CASE("bank complexity is identical under every instruction set") {
  const auto isas = supported_isas();
  std::vector<double> values;
  for (auto isa : isas) {
    set_preferred_isa(isa);
    std::vector<double> per;
    values.push_back(complexity_by_bank(12, 2, Alphabet(2), 1, &per));
  }
  set_preferred_isa(isas.back());
  for (double v : values) CHECK(v == values.front());
}

TEST_CASE("dispatch names") {
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_supported(Isa::scalar));
  CHECK(active_kernels().step != nullptr);
}

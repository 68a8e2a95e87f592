#include <immintrin.h>

#include <limits>

#include "unifilar/kernels.hpp"

namespace unifilar::kernels {

// Lanes are processed eight at a time. States are selected by comparing the
// lane's state against each of the k candidates, so counts and tau are read
// with plain vector loads; only the delta table needs a gather.
void bank_step_avx2(const BankStep& s) {
  const int lanes = s.shape.lanes;
  const int symbols = s.shape.symbols;
  const int k = s.shape.k;
  const __m256i one = _mm256_set1_epi32(1);
  for (int l = 0; l < lanes; l += 8) {
    const __m256i st = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s.state_in + l));
    __m256i c_sel = _mm256_setzero_si256();
    __m256i m_sel = _mm256_setzero_si256();
    __m256i next = _mm256_setzero_si256();
    for (int j = 0; j < k; ++j) {
      const __m256i mask = _mm256_cmpeq_epi32(st, _mm256_set1_epi32(j));
      const std::size_t cell = static_cast<std::size_t>(j * symbols + s.symbol) * lanes + l;
      const std::size_t rcell = static_cast<std::size_t>(j) * lanes + l;
      auto* cp = reinterpret_cast<__m256i*>(s.counts + cell);
      auto* rp = reinterpret_cast<__m256i*>(s.row + rcell);
      const __m256i c = _mm256_loadu_si256(cp);
      const __m256i m = _mm256_loadu_si256(rp);
      const __m256i t = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s.tau + cell));
      c_sel = _mm256_blendv_epi8(c_sel, c, mask);
      m_sel = _mm256_blendv_epi8(m_sel, m, mask);
      next = _mm256_blendv_epi8(next, t, mask);
      _mm256_storeu_si256(cp, _mm256_add_epi32(c, _mm256_and_si256(mask, one)));
      _mm256_storeu_si256(rp, _mm256_add_epi32(m, _mm256_and_si256(mask, one)));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(s.state_out + l), next);
    for (int h = 0; h < 2; ++h) {
      const __m128i ci = h ? _mm256_extracti128_si256(c_sel, 1) : _mm256_castsi256_si128(c_sel);
      const __m128i mi = h ? _mm256_extracti128_si256(m_sel, 1) : _mm256_castsi256_si128(m_sel);
      const __m256d dc = _mm256_i32gather_pd(s.delta, ci, 8);
      const __m256d dm = _mm256_i32gather_pd(s.delta, mi, 8);
      const __m256d ll = _mm256_loadu_pd(s.ll_in + l + 4 * h);
      _mm256_storeu_pd(s.ll_out + l + 4 * h, _mm256_add_pd(ll, _mm256_sub_pd(dc, dm)));
    }
  }
}

void bank_unstep_avx2(const BankShape& shape, std::int32_t* counts, std::int32_t* row,
                      const std::int32_t* state_before, Symbol symbol) {
  const int lanes = shape.lanes;
  const __m256i one = _mm256_set1_epi32(1);
  for (int l = 0; l < lanes; l += 8) {
    const __m256i st = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(state_before + l));
    for (int j = 0; j < shape.k; ++j) {
      const __m256i dec = _mm256_and_si256(_mm256_cmpeq_epi32(st, _mm256_set1_epi32(j)), one);
      auto* cp = reinterpret_cast<__m256i*>(
          counts + static_cast<std::size_t>(j * shape.symbols + symbol) * lanes + l);
      auto* rp = reinterpret_cast<__m256i*>(row + static_cast<std::size_t>(j) * lanes + l);
      _mm256_storeu_si256(cp, _mm256_sub_epi32(_mm256_loadu_si256(cp), dec));
      _mm256_storeu_si256(rp, _mm256_sub_epi32(_mm256_loadu_si256(rp), dec));
    }
  }
}

double lane_max_avx2(const double* v, int lanes) {
  __m256d m = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  for (int l = 0; l < lanes; l += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(v + l));
  alignas(32) double tmp[4];
  _mm256_store_pd(tmp, m);
  double r = tmp[0];
  for (int i = 1; i < 4; ++i) r = tmp[i] > r ? tmp[i] : r;
  return r;
}

}  // namespace unifilar::kernels

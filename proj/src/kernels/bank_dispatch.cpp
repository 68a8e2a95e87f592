#include <atomic>
#include <cstdlib>
#include <cstring>

#include "unifilar/error.hpp"
#include "unifilar/kernels.hpp"

namespace unifilar::kernels {

namespace {

const KernelSet kScalar{Isa::scalar, bank_step_scalar, bank_unstep_scalar, lane_max_scalar};
#if defined(UNIFILAR_BUILD_AVX2)
const KernelSet kAvx2{Isa::avx2, bank_step_avx2, bank_unstep_avx2, lane_max_avx2};
#endif

Isa detect() {
  if (const char* env = std::getenv("UNIFILAR_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& preferred() {
  static std::atomic<int> p{static_cast<int>(detect())};
  return p;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(UNIFILAR_BUILD_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::scalar};
  if (isa_supported(Isa::avx2)) out.push_back(Isa::avx2);
  return out;
}

const KernelSet& kernels_for(Isa isa) {
  require(isa_supported(isa), ErrorCategory::invalid_input,
          std::string("instruction set not available: ") + std::string(isa_name(isa)));
#if defined(UNIFILAR_BUILD_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelSet& active_kernels() { return kernels_for(static_cast<Isa>(preferred().load())); }

void set_preferred_isa(Isa isa) {
  require(isa_supported(isa), ErrorCategory::invalid_input,
          std::string("instruction set not available: ") + std::string(isa_name(isa)));
  preferred().store(static_cast<int>(isa));
}

}  // namespace unifilar::kernels

#include <cstdlib>
#include <string>

#include "incorr/error.hpp"
#include "incorr/simd.hpp"

namespace incorr::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::InvalidArgument, "instruction set not supported on this CPU: " + std::string(to_string(isa)));
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

const KernelTable& kernels() {
  static const KernelTable& active = [] () -> const KernelTable& {
    const char* requested = std::getenv("INCORR_SIMD");
    if (requested != nullptr && std::string(requested) == "scalar") return detail::scalar_table();
    return kernels_for(isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar);
  }();
  return active;
}

}  // namespace incorr::simd

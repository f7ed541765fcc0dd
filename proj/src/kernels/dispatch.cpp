#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pcglasso/kernels.hpp"

namespace pcglasso::kernels {

#ifdef PCGLASSO_HAVE_AVX2
bool detail::cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#ifdef PCGLASSO_HAVE_AVX2
      return detail::cpu_has_avx2();
#else
      return false;
#endif
    case Isa::neon:
#ifdef PCGLASSO_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table& table(Isa isa) {
  if (!available(isa)) throw std::invalid_argument("kernel set not available on this CPU: " + std::string(name(isa)));
  switch (isa) {
#ifdef PCGLASSO_HAVE_AVX2
    case Isa::avx2:
      return detail::avx2_table;
#endif
#ifdef PCGLASSO_HAVE_NEON
    case Isa::neon:
      return detail::neon_table;
#endif
    default:
      return detail::scalar_table;
  }
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

namespace {

const Table& select() {
  const char* env = std::getenv("PCGLASSO_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return detail::scalar_table;
  if (want == "avx2" && available(Isa::avx2)) return table(Isa::avx2);
  if (want == "neon" && available(Isa::neon)) return table(Isa::neon);
  if (available(Isa::avx2)) return table(Isa::avx2);
  if (available(Isa::neon)) return table(Isa::neon);
  return detail::scalar_table;
}

}  // namespace

const Table& active() {
  static const Table& chosen = select();
  return chosen;
}

}  // namespace pcglasso::kernels

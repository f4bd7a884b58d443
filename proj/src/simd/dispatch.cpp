#include <cstdlib>
#include <cstring>

#include "skinrig/simd/kernels.hpp"

namespace skinrig::simd {

namespace {

constexpr KernelTable kScalar{&scalar::squared_distances, &scalar::moments,
                              &scalar::affine_sse};
#ifdef SKINRIG_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2{&avx2::squared_distances, &avx2::moments,
                            &avx2::affine_sse};
#endif
#ifdef SKINRIG_HAVE_NEON_KERNELS
constexpr KernelTable kNeon{&neon::squared_distances, &neon::moments,
                            &neon::affine_sse};
#endif

bool cpu_has_avx2() {
#if defined(SKINRIG_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Level detect() {
  if (const char* forced = std::getenv("SKINRIG_SIMD");
      forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return Level::Scalar;
  }
#ifdef SKINRIG_HAVE_NEON_KERNELS
  return Level::Neon;
#else
  return cpu_has_avx2() ? Level::Avx2 : Level::Scalar;
#endif
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Level level) {
  switch (level) {
    case Level::Scalar:
      return &kScalar;
    case Level::Avx2:
#ifdef SKINRIG_HAVE_AVX2_KERNELS
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
    case Level::Neon:
#ifdef SKINRIG_HAVE_NEON_KERNELS
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Level active_level() {
  static const Level level = detect();
  return level;
}

const KernelTable& active() {
  static const KernelTable* table = table_for(active_level());
  return *table;
}

}  // namespace skinrig::simd

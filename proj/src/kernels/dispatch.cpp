#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace inls::kernels {

namespace {

constexpr KernelTable kScalar{
    Isa::scalar, "scalar", &scalar::weighted_abs2, &scalar::dot, &scalar::face_diff_abs2,
    &scalar::cn_rhs,
};

#if defined(INLS_HAVE_AVX2)
constexpr KernelTable kAvx2{
    Isa::avx2, "avx2", &avx2::weighted_abs2, &avx2::dot, &avx2::face_diff_abs2, &avx2::cn_rhs,
};

bool cpu_has_avx2() noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("INLS_LAB_SIMD")) {
    if (std::string_view(env) == "scalar") return kScalar;
  }
  if (const KernelTable* t = avx2_table()) return *t;
  return kScalar;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(INLS_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace inls::kernels

#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "inls/kernels/kernels.hpp"

using namespace inls;
using C = std::complex<double>;

namespace {

struct Data {
  std::vector<double> w, lo, di, up;
  std::vector<C> a, b;
};

Data make_data(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  Data d;
  for (std::size_t j = 0; j < n; ++j) {
    d.w.push_back(pos(rng));
    d.lo.push_back(nd(rng));
    d.di.push_back(nd(rng));
    d.up.push_back(nd(rng));
    d.a.emplace_back(nd(rng), nd(rng));
    d.b.emplace_back(nd(rng), nd(rng));
  }
  return d;
}

void compare(const kernels::KernelTable& ref, const kernels::KernelTable& simd) {
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 1000u, 1001u}) {
    CAPTURE(n);
    const Data d = make_data(n, static_cast<unsigned>(n) + 1);
    const double s0 = ref.weighted_abs2(d.w.data(), d.a.data(), n);
    const double s1 = simd.weighted_abs2(d.w.data(), d.a.data(), n);
    CHECK(s1 == doctest::Approx(s0).epsilon(1e-13));
    std::vector<double> rv(d.di.begin(), d.di.end());
    const double t0 = ref.dot(d.w.data(), rv.data(), n);
    const double t1 = simd.dot(d.w.data(), rv.data(), n);
    CHECK(std::abs(t1 - t0) <= 1e-12 * (1.0 + std::abs(t0)) * std::max<std::size_t>(n, 1));
    const double f0 = ref.face_diff_abs2(d.w.data(), d.a.data(), n);
    const double f1 = simd.face_diff_abs2(d.w.data(), d.a.data(), n);
    CHECK(f1 == doctest::Approx(f0).epsilon(1e-13));

    std::vector<C> o0(n), o1(n);
    ref.cn_rhs(d.lo.data(), d.di.data(), d.up.data(), 0.37, d.a.data(), o0.data(), n);
    simd.cn_rhs(d.lo.data(), d.di.data(), d.up.data(), 0.37, d.a.data(), o1.data(), n);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(o1[j] - o0[j]) <= 1e-14 * (1.0 + std::abs(o0[j])));
  }
}

}  // namespace

TEST_CASE("scalar kernels match plain loops") {
  const auto& k = kernels::scalar_table();
  const Data d = make_data(17, 5);
  double s = 0.0, f = 0.0;
  for (std::size_t j = 0; j < 17; ++j) {
    s += d.w[j] * std::norm(d.a[j]);
    const C next = j + 1 < 17 ? d.a[j + 1] : C{};
    f += d.w[j] * std::norm(next - d.a[j]);
  }
  CHECK(k.weighted_abs2(d.w.data(), d.a.data(), 17) == doctest::Approx(s).epsilon(1e-15));
  CHECK(k.face_diff_abs2(d.w.data(), d.a.data(), 17) == doctest::Approx(f).epsilon(1e-15));
  std::vector<C> o(17);
  k.cn_rhs(d.lo.data(), d.di.data(), d.up.data(), 0.5, d.a.data(), o.data(), 17);
  for (std::size_t j = 0; j < 17; ++j) {
    C lap = d.di[j] * d.a[j];
    if (j > 0) lap += d.lo[j] * d.a[j - 1];
    if (j + 1 < 17) lap += d.up[j] * d.a[j + 1];
    const C expect = d.a[j] + C(0.0, 0.5) * lap;
    CHECK(std::abs(o[j] - expect) < 1e-14);
  }
}

TEST_CASE("AVX2 kernels are equivalent to the scalar reference") {
  const auto* simd = kernels::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 kernels unavailable on this build/CPU; skipped");
    return;
  }
  compare(kernels::scalar_table(), *simd);
}

TEST_CASE("active table is one of the two") {
  const auto& a = kernels::active();
  CHECK((&a == &kernels::scalar_table() || &a == kernels::avx2_table()));
}

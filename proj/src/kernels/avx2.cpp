// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace inls::kernels::avx2 {

namespace {

// [w0, w1] -> [w0, w0, w1, w1], matching the interleaved (re, im) layout.
inline __m256d splat_pairs(const double* w) {
  const __m128d w2 = _mm_loadu_pd(w);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline const double* as_doubles(const Complex* z) { return reinterpret_cast<const double*>(z); }
inline double* as_doubles(Complex* z) { return reinterpret_cast<double*>(z); }

}  // namespace

double weighted_abs2(const double* w, const Complex* u, std::size_t n) {
  const double* x = as_doubles(u);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d a = _mm256_loadu_pd(x + 2 * j);
    const __m256d b = _mm256_loadu_pd(x + 2 * j + 4);
    acc0 = _mm256_fmadd_pd(splat_pairs(w + j), _mm256_mul_pd(a, a), acc0);
    acc1 = _mm256_fmadd_pd(splat_pairs(w + j + 2), _mm256_mul_pd(b, b), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) acc += w[j] * std::norm(u[j]);
  return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) acc += a[j] * b[j];
  return acc;
}

double face_diff_abs2(const double* face_w, const Complex* u, std::size_t n) {
  if (n == 0) return 0.0;
  const double* x = as_doubles(u);
  __m256d acc = _mm256_setzero_pd();
  std::size_t f = 0;
  // Two faces per iteration; face f needs u[f] and u[f+1].
  for (; f + 3 <= n; f += 2) {
    const __m256d left = _mm256_loadu_pd(x + 2 * f);
    const __m256d right = _mm256_loadu_pd(x + 2 * f + 2);
    const __m256d d = _mm256_sub_pd(right, left);
    acc = _mm256_fmadd_pd(splat_pairs(face_w + f), _mm256_mul_pd(d, d), acc);
  }
  double total = hsum(acc);
  for (; f + 1 < n; ++f) total += face_w[f] * std::norm(u[f + 1] - u[f]);
  total += face_w[n - 1] * std::norm(u[n - 1]);
  return total;
}

void cn_rhs(const double* lo, const double* di, const double* up, double tau, const Complex* u,
            Complex* out, std::size_t n) {
  if (n < 4) {
    scalar::cn_rhs(lo, di, up, tau, u, out, n);
    return;
  }
  const double* x = as_doubles(u);
  double* y = as_doubles(out);
  const __m256d itau = _mm256_setr_pd(-tau, tau, -tau, tau);

  {
    const Complex s = di[0] * u[0] + up[0] * u[1];
    out[0] = Complex(u[0].real() - tau * s.imag(), u[0].imag() + tau * s.real());
  }
  std::size_t j = 1;
  for (; j + 2 < n; j += 2) {
    const __m256d um = _mm256_loadu_pd(x + 2 * (j - 1));
    const __m256d uc = _mm256_loadu_pd(x + 2 * j);
    const __m256d up1 = _mm256_loadu_pd(x + 2 * (j + 1));
    __m256d s = _mm256_mul_pd(splat_pairs(di + j), uc);
    s = _mm256_fmadd_pd(splat_pairs(lo + j), um, s);
    s = _mm256_fmadd_pd(splat_pairs(up + j), up1, s);
    // i s = (-Im s, Re s)
    const __m256d swapped = _mm256_permute_pd(s, 0x5);
    _mm256_storeu_pd(y + 2 * j, _mm256_fmadd_pd(itau, swapped, uc));
  }
  for (; j < n; ++j) {
    Complex s = di[j] * u[j] + lo[j] * u[j - 1];
    if (j + 1 < n) s += up[j] * u[j + 1];
    out[j] = Complex(u[j].real() - tau * s.imag(), u[j].imag() + tau * s.real());
  }
}

}  // namespace inls::kernels::avx2

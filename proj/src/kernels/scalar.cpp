#include "kernels_impl.hpp"

namespace inls::kernels::scalar {

double weighted_abs2(const double* w, const Complex* u, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += w[j] * (u[j].real() * u[j].real() + u[j].imag() * u[j].imag());
  }
  return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[j];
  return acc;
}

double face_diff_abs2(const double* face_w, const Complex* u, std::size_t n) {
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t f = 0; f + 1 < n; ++f) {
    const double dre = u[f + 1].real() - u[f].real();
    const double dim = u[f + 1].imag() - u[f].imag();
    acc += face_w[f] * (dre * dre + dim * dim);
  }
  const Complex last = u[n - 1];
  acc += face_w[n - 1] * (last.real() * last.real() + last.imag() * last.imag());
  return acc;
}

void cn_rhs(const double* lo, const double* di, const double* up, double tau, const Complex* u,
            Complex* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    Complex s = di[j] * u[j];
    if (j > 0) s += lo[j] * u[j - 1];
    if (j + 1 < n) s += up[j] * u[j + 1];
    // u + i tau s
    out[j] = Complex(u[j].real() - tau * s.imag(), u[j].imag() + tau * s.real());
  }
}

}  // namespace inls::kernels::scalar

#pragma once

#include "inls/kernels/kernels.hpp"

namespace inls::kernels {

namespace scalar {
double weighted_abs2(const double* w, const Complex* u, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double face_diff_abs2(const double* face_w, const Complex* u, std::size_t n);
void cn_rhs(const double* lo, const double* di, const double* up, double tau, const Complex* u,
            Complex* out, std::size_t n);
}  // namespace scalar

#if defined(INLS_HAVE_AVX2)
namespace avx2 {
double weighted_abs2(const double* w, const Complex* u, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double face_diff_abs2(const double* face_w, const Complex* u, std::size_t n);
void cn_rhs(const double* lo, const double* di, const double* up, double tau, const Complex* u,
            Complex* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace inls::kernels

#pragma once

// Data-parallel inner loops shared by the functionals and the integrator.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled separately and selected at runtime when the CPU supports it.
// Setting INLS_LAB_SIMD=scalar in the environment forces the reference path.
// Reductions in the vector path use a different summation order, so results
// agree with the reference to rounding, not bit-for-bit.

#include <complex>
#include <cstddef>
#include <string_view>

namespace inls::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  // sum_j w_j |u_j|^2
  double (*weighted_abs2)(const double* w, const Complex* u, std::size_t n);

  // sum_j a_j b_j
  double (*dot)(const double* a, const double* b, std::size_t n);

  // sum_{f<n} W_f |u_{f+1} - u_f|^2 with u_n := 0 (Dirichlet ghost).
  double (*face_diff_abs2)(const double* face_w, const Complex* u, std::size_t n);

  // out_j = u_j + i tau (lo_j u_{j-1} + di_j u_j + up_j u_{j+1}),
  // with u_{-1} = u_n = 0. Boundary closures live in the coefficients.
  void (*cn_rhs)(const double* lo, const double* di, const double* up, double tau,
                 const Complex* u, Complex* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

// Table chosen once per process.
const KernelTable& active() noexcept;

}  // namespace inls::kernels

#pragma once

// Element-wise complex kernels used by the FFT-domain products and residual
// norms. Each kernel has a scalar reference and, on x86-64, an AVX2/FMA
// variant. The active variant is chosen once at startup from the CPU
// features and can be overridden with HTGD_ISA=scalar|avx2 or set_isa().

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace htgd::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  /// out[i] = x[i] * y[i]
  void (*cmul)(const Complex* x, const Complex* y, Complex* out, std::size_t len);
  /// acc[i] += x[i] * y[i]
  void (*cmul_acc)(const Complex* x, const Complex* y, Complex* acc, std::size_t len);
  /// out[i] = x[i] * w[i], w real
  void (*scale_real)(const Complex* x, const double* w, Complex* out, std::size_t len);
  /// sum |x[i]|^2
  double (*norm_sq)(const Complex* x, std::size_t len);
};

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);
/// Parses "scalar" / "avx2"; throws InvalidArgument otherwise.
Isa parse_isa(std::string_view name);

/// Table for one variant; throws InvalidArgument when the CPU or build lacks it.
const KernelTable& table(Isa isa);

Isa active_isa();
void set_isa(Isa isa);

// Dispatching front ends over the active table. Sizes must agree.
void cmul(std::span<const Complex> x, std::span<const Complex> y, std::span<Complex> out);
void cmul_acc(std::span<const Complex> x, std::span<const Complex> y, std::span<Complex> acc);
void scale_real(std::span<const Complex> x, std::span<const double> w, std::span<Complex> out);
double norm_sq(std::span<const Complex> x);

namespace scalar {
void cmul(const Complex* x, const Complex* y, Complex* out, std::size_t len);
void cmul_acc(const Complex* x, const Complex* y, Complex* acc, std::size_t len);
void scale_real(const Complex* x, const double* w, Complex* out, std::size_t len);
double norm_sq(const Complex* x, std::size_t len);
}  // namespace scalar

namespace avx2 {
void cmul(const Complex* x, const Complex* y, Complex* out, std::size_t len);
void cmul_acc(const Complex* x, const Complex* y, Complex* acc, std::size_t len);
void scale_real(const Complex* x, const double* w, Complex* out, std::size_t len);
double norm_sq(const Complex* x, std::size_t len);
}  // namespace avx2

}  // namespace htgd::kernels

#include "htgd/kernels.hpp"

namespace htgd::kernels::scalar {

// Written on the real/imaginary parts directly: std::complex operator* adds
// NaN recovery branches that block vectorization and change rounding.

void cmul(const Complex* x, const Complex* y, Complex* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    out[i] = Complex(xr * yr - xi * yi, xr * yi + xi * yr);
  }
}

void cmul_acc(const Complex* x, const Complex* y, Complex* acc, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    acc[i] = Complex(acc[i].real() + (xr * yr - xi * yi), acc[i].imag() + (xr * yi + xi * yr));
  }
}

void scale_real(const Complex* x, const double* w, Complex* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = Complex(x[i].real() * w[i], x[i].imag() * w[i]);
}

double norm_sq(const Complex* x, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

}  // namespace htgd::kernels::scalar

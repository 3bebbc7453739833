// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.

#include <immintrin.h>

#include "htgd/kernels.hpp"

namespace htgd::kernels::avx2 {
namespace {

// Two interleaved complex doubles per register: [re0 im0 re1 im1].
inline __m256d mul2(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);          // br0 br0 br1 br1
  const __m256d b_im = _mm256_permute_pd(b, 0xF);     // bi0 bi0 bi1 bi1
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);     // ai0 ar0 ai1 ar1
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline const double* d(const Complex* p) { return reinterpret_cast<const double*>(p); }
inline double* d(Complex* p) { return reinterpret_cast<double*>(p); }

}  // namespace

void cmul(const Complex* x, const Complex* y, Complex* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d a = _mm256_loadu_pd(d(x + i));
    const __m256d b = _mm256_loadu_pd(d(y + i));
    _mm256_storeu_pd(d(out + i), mul2(a, b));
  }
  if (i < len) scalar::cmul(x + i, y + i, out + i, len - i);
}

void cmul_acc(const Complex* x, const Complex* y, Complex* acc, std::size_t len) {
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d a = _mm256_loadu_pd(d(x + i));
    const __m256d b = _mm256_loadu_pd(d(y + i));
    const __m256d c = _mm256_loadu_pd(d(acc + i));
    _mm256_storeu_pd(d(acc + i), _mm256_add_pd(c, mul2(a, b)));
  }
  if (i < len) scalar::cmul_acc(x + i, y + i, acc + i, len - i);
}

void scale_real(const Complex* x, const double* w, Complex* out, std::size_t len) {
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d a = _mm256_loadu_pd(d(x + i));
    const __m256d ww = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
    _mm256_storeu_pd(d(out + i), _mm256_mul_pd(a, ww));
  }
  if (i < len) scalar::scale_real(x + i, w + i, out + i, len - i);
}

double norm_sq(const Complex* x, std::size_t len) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d a = _mm256_loadu_pd(d(x + i));
    const __m256d b = _mm256_loadu_pd(d(x + i + 2));
    s0 = _mm256_fmadd_pd(a, a, s0);
    s1 = _mm256_fmadd_pd(b, b, s1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (i < len) s += scalar::norm_sq(x + i, len - i);
  return s;
}

}  // namespace htgd::kernels::avx2

#pragma once

#include <complex>
#include <cstddef>

namespace htgd {

/// Cached FFTW plan pair for one transform length. Plans are created under a
/// lock and executed through the new-array interface, so a single plan may be
/// shared by concurrent callers with their own buffers.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return size_; }
  /// out = DFT(in). `in` and `out` must not alias.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  /// out = unnormalized inverse DFT(in).
  void inverse(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  std::size_t size_;
  void* fwd_;
  void* inv_;
};

/// Process-wide plan for `size`, created on first use.
const FftPlan& fft_plan(std::size_t size);

/// Smallest power of two >= 2n; long enough for the lifts' cyclic convolutions.
std::size_t conv_fft_size(std::size_t n);

}  // namespace htgd

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace aec {

// Real-input FFT of a fixed size, backed by FFTW. An instance owns its plans
// and scratch buffers and must not be shared across threads; construct one
// per thread (plan creation is serialized internally, execution is not).
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  void forward(const double* in, std::complex<double>* out);
  // Scaled by 1/size, so inverse(forward(x)) == x up to rounding.
  void inverse(const std::complex<double>* in, double* out);

 private:
  int n_;
  void* plan_fwd_;
  void* plan_inv_;
  double* real_buf_;
  void* cplx_buf_;
};

// Full linear convolution, length x.size() + h.size() - 1, via a zero-padded
// power-of-two FFT.
std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h);

}  // namespace aec

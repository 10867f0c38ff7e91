#include "aec/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace aec {
namespace {

// FFTW plan creation/destruction is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(int size) : n_(size) {
  if (size <= 0) {
    throw std::invalid_argument("RealFft: size must be positive");
  }
  real_buf_ = fftw_alloc_real(static_cast<std::size_t>(n_));
  auto* cbuf = fftw_alloc_complex(static_cast<std::size_t>(bins()));
  cplx_buf_ = cbuf;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_1d(n_, real_buf_, cbuf, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(n_, cbuf, real_buf_, FFTW_ESTIMATE);
  if (plan_fwd_ == nullptr || plan_inv_ == nullptr) {
    throw std::runtime_error("RealFft: plan creation failed");
  }
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(real_buf_, in, sizeof(double) * static_cast<std::size_t>(n_));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out, cplx_buf_, sizeof(std::complex<double>) * static_cast<std::size_t>(bins()));
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  std::memcpy(cplx_buf_, in, sizeof(std::complex<double>) * static_cast<std::size_t>(bins()));
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) {
    out[i] = real_buf_[i] * scale;
  }
}

std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) {
    return {};
  }
  const std::size_t out_len = x.size() + h.size() - 1;
  std::size_t n = 1;
  while (n < out_len) {
    n <<= 1;
  }
  RealFft fft(static_cast<int>(n));
  std::vector<double> xa(n, 0.0);
  std::vector<double> ha(n, 0.0);
  std::copy(x.begin(), x.end(), xa.begin());
  std::copy(h.begin(), h.end(), ha.begin());
  std::vector<std::complex<double>> xs(static_cast<std::size_t>(fft.bins()));
  std::vector<std::complex<double>> hs(static_cast<std::size_t>(fft.bins()));
  fft.forward(xa.data(), xs.data());
  fft.forward(ha.data(), hs.data());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] *= hs[i];
  }
  std::vector<double> full(n);
  fft.inverse(xs.data(), full.data());
  full.resize(out_len);
  return full;
}

}  // namespace aec

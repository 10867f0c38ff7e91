#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "aec/audio.hpp"
#include "aec/kernels.hpp"

namespace aec {
namespace {

double bessel_i0(double x) {
  // Series expansion; converges quickly for the beta values used here.
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-18 * sum) {
      break;
    }
  }
  return sum;
}

// Kaiser-windowed sinc lowpass. cutoff is in cycles per sample at the
// filter's rate; gain scales the passband.
std::vector<double> design_lowpass(int taps, double cutoff, double gain, double beta) {
  std::vector<double> h(static_cast<std::size_t>(taps));
  const double center = (taps - 1) / 2.0;
  const double i0b = bessel_i0(beta);
  for (int n = 0; n < taps; ++n) {
    const double t = n - center;
    const double x = 2.0 * cutoff * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double u = 2.0 * n / (taps - 1.0) - 1.0;
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0b;
    h[static_cast<std::size_t>(n)] = gain * 2.0 * cutoff * sinc * w;
  }
  return h;
}

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate_hz) {
  const int source = clip.sample_rate_hz;
  if (source == target_rate_hz) {
    return clip;
  }
  const bool supported = (source == 16000 && target_rate_hz == 48000) ||
                         (source == 48000 && target_rate_hz == 16000);
  if (!supported) {
    throw std::invalid_argument("resample: unsupported rate pair " + std::to_string(source) +
                                " -> " + std::to_string(target_rate_hz));
  }
  const int up = target_rate_hz > source ? 3 : 1;
  const int down = target_rate_hz > source ? 1 : 3;
  const double high_rate = static_cast<double>(source) * up;

  // Cutoff just under the narrower Nyquist; ~90 dB stopband Kaiser.
  const int taps = 301;
  const double cutoff_hz = 0.45 * std::min(source, target_rate_hz);
  std::vector<double> h = design_lowpass(taps, cutoff_hz / high_rate, up, 8.6);
  const int delay = (taps - 1) / 2;

  const auto in_len = static_cast<std::ptrdiff_t>(clip.samples.size());
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(clip.samples.size()) * target_rate_hz / source));

  AudioClip out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(out_len);
  const double* x = clip.samples.data();
  double* y = out.samples.data();

  kern::parallel_for(static_cast<std::ptrdiff_t>(out_len), [&](std::size_t j) {
    // Output j sits at high-rate position j*down + delay after the filter.
    const std::ptrdiff_t top = static_cast<std::ptrdiff_t>(j) * down + delay;
    std::ptrdiff_t n_lo = (top - (taps - 1) + up - 1) / up;  // ceil
    std::ptrdiff_t n_hi = top / up;                          // floor
    n_lo = std::max<std::ptrdiff_t>(n_lo, 0);
    n_hi = std::min(n_hi, in_len - 1);
    double acc = 0.0;
    for (std::ptrdiff_t n = n_lo; n <= n_hi; ++n) {
      acc += h[static_cast<std::size_t>(top - n * up)] * x[n];
    }
    y[j] = acc;
  });
  return out;
}

}  // namespace aec

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "aec/fft.hpp"
#include "aec/nlms.hpp"

namespace aec {

std::optional<DelayEstimate> estimate_delay(const AudioClip& mic, const AudioClip& loopback,
                                            double max_delay_ms, double min_confidence) {
  if (mic.sample_rate_hz != loopback.sample_rate_hz) {
    throw std::invalid_argument("estimate_delay: rate mismatch");
  }
  const int rate = mic.sample_rate_hz;
  const std::size_t n = std::min(mic.samples.size(), loopback.samples.size());
  if (n < static_cast<std::size_t>(rate)) {
    throw std::invalid_argument("estimate_delay: need at least 1 s of audio");
  }
  const auto max_lag = static_cast<std::size_t>(std::llround(max_delay_ms / 1000.0 * rate));
  if (max_lag == 0) {
    throw std::invalid_argument("estimate_delay: max_delay_ms too small");
  }

  std::size_t nfft = 1;
  while (nfft < n + max_lag + 1) {
    nfft <<= 1;
  }
  RealFft fft(static_cast<int>(nfft));
  const auto bins = static_cast<std::size_t>(fft.bins());

  std::vector<double> buf(nfft, 0.0);
  std::copy_n(mic.samples.begin(), n, buf.begin());
  std::vector<std::complex<double>> spec_mic(bins);
  fft.forward(buf.data(), spec_mic.data());

  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy_n(loopback.samples.begin(), n, buf.begin());
  std::vector<std::complex<double>> spec_loop(bins);
  fft.forward(buf.data(), spec_loop.data());

  // Phase transform: keep only phase of the cross spectrum.
  std::size_t active_bins = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    std::complex<double> g = spec_mic[k] * std::conj(spec_loop[k]);
    const double mag = std::abs(g);
    if (mag > 1e-12) {
      spec_mic[k] = g / mag;
      ++active_bins;
    } else {
      spec_mic[k] = 0.0;
    }
  }
  if (active_bins == 0) {
    return std::nullopt;
  }

  std::vector<double> corr(nfft);
  fft.inverse(spec_mic.data(), corr.data());
  // inverse() scales by 1/nfft, so a perfect pure delay peaks at
  // active_bins/nfft (full-spectrum coherence sums ~2*bins terms; use the
  // single-sided count as the normalizer, which keeps the pure-delay score
  // near 1 and uncorrelated noise near 1/sqrt(bins)).
  const double norm = static_cast<double>(nfft) / (2.0 * static_cast<double>(active_bins));

  auto value_at = [&](std::ptrdiff_t lag) {
    const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag)
                                     : nfft - static_cast<std::size_t>(-lag);
    return corr[idx] * norm;
  };

  std::ptrdiff_t best_lag = 0;
  double best = -1.0;
  for (std::ptrdiff_t lag = -static_cast<std::ptrdiff_t>(max_lag);
       lag <= static_cast<std::ptrdiff_t>(max_lag); ++lag) {
    const double v = value_at(lag);
    if (v > best) {
      best = v;
      best_lag = lag;
    }
  }
  if (best < min_confidence) {
    return std::nullopt;
  }

  // Parabolic refinement around the peak.
  const double y0 = value_at(best_lag - 1);
  const double y1 = best;
  const double y2 = value_at(best_lag + 1);
  const double denom = y0 - 2.0 * y1 + y2;
  double offset = 0.0;
  if (denom < 0.0) {
    offset = 0.5 * (y0 - y2) / denom;
    offset = std::clamp(offset, -0.5, 0.5);
  }
  const double lag_samples = std::max(0.0, static_cast<double>(best_lag) + offset);
  return DelayEstimate{lag_samples * 1000.0 / rate, best};
}

}  // namespace aec

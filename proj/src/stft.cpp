#include "aec/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aec/fft.hpp"

namespace aec {

void StftConfig::validate() const {
  if (frame_len <= 0 || hop <= 0 || hop > frame_len || dft_size < frame_len) {
    throw std::invalid_argument("StftConfig: need 0 < hop <= frame_len <= dft_size");
  }
}

std::vector<double> make_window(const StftConfig& cfg) {
  std::vector<double> w(static_cast<std::size_t>(cfg.frame_len));
  if (cfg.window == StftConfig::Window::rect) {
    std::fill(w.begin(), w.end(), 1.0);
    return w;
  }
  for (int n = 0; n < cfg.frame_len; ++n) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.frame_len);
    w[static_cast<std::size_t>(n)] = std::sqrt(hann);
  }
  return w;
}

Mat Spectrogram::magnitude() const {
  Mat m(num_frames, num_bins);
  for (int t = 0; t < num_frames; ++t) {
    for (int f = 0; f < num_bins; ++f) {
      m(t, f) = std::abs(at(t, f));
    }
  }
  return m;
}

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  cfg.validate();
  const auto len = static_cast<std::ptrdiff_t>(clip.samples.size());
  if (len < cfg.frame_len) {
    throw std::invalid_argument("stft: clip shorter than one frame");
  }
  const int num_frames = 1 + static_cast<int>((len - cfg.frame_len) / cfg.hop);
  const std::vector<double> window = make_window(cfg);

  Spectrogram spec;
  spec.cfg = cfg;
  spec.sample_rate_hz = clip.sample_rate_hz;
  spec.num_frames = num_frames;
  spec.num_bins = cfg.bins();
  spec.data.resize(static_cast<std::size_t>(num_frames) * spec.num_bins);

#pragma omp parallel
  {
    RealFft fft(cfg.dft_size);
    std::vector<double> frame(static_cast<std::size_t>(cfg.dft_size), 0.0);
#pragma omp for schedule(static)
    for (int t = 0; t < num_frames; ++t) {
      const std::size_t t0 = static_cast<std::size_t>(t) * cfg.hop;
      for (int n = 0; n < cfg.frame_len; ++n) {
        frame[static_cast<std::size_t>(n)] =
            clip.samples[t0 + static_cast<std::size_t>(n)] * window[static_cast<std::size_t>(n)];
      }
      fft.forward(frame.data(), spec.row(t));
    }
  }
  return spec;
}

AudioClip istft(const Spectrogram& spec) {
  spec.cfg.validate();
  if (spec.num_frames < 1) {
    throw std::invalid_argument("istft: need at least one frame");
  }
  if (spec.num_bins != spec.cfg.bins() ||
      spec.data.size() != static_cast<std::size_t>(spec.num_frames) * spec.num_bins) {
    throw std::invalid_argument("istft: frame data does not match config");
  }
  const StftConfig& cfg = spec.cfg;
  const std::vector<double> window = make_window(cfg);
  const std::size_t out_len =
      static_cast<std::size_t>(cfg.frame_len) + static_cast<std::size_t>(spec.num_frames - 1) * cfg.hop;

  // Inverse-transform frames in parallel, then overlap-add serially.
  Mat frames(spec.num_frames, cfg.dft_size);
#pragma omp parallel
  {
    RealFft fft(cfg.dft_size);
#pragma omp for schedule(static)
    for (int t = 0; t < spec.num_frames; ++t) {
      fft.inverse(spec.row(t), frames.row(t));
    }
  }

  std::vector<double> acc(out_len, 0.0);
  std::vector<double> wsum(out_len, 0.0);
  for (int t = 0; t < spec.num_frames; ++t) {
    const std::size_t t0 = static_cast<std::size_t>(t) * cfg.hop;
    const double* frame = frames.row(t);
    for (int n = 0; n < cfg.frame_len; ++n) {
      const double w = window[static_cast<std::size_t>(n)];
      acc[t0 + static_cast<std::size_t>(n)] += w * frame[n];
      wsum[t0 + static_cast<std::size_t>(n)] += w * w;
    }
  }

  AudioClip out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    out.samples[i] = wsum[i] > 1e-10 ? acc[i] / wsum[i] : 0.0;
  }
  return out;
}

Mat log_power(const Spectrogram& spec, double floor_eps) {
  if (floor_eps <= 0.0) {
    throw std::invalid_argument("log_power: floor_eps must be positive");
  }
  Mat m(spec.num_frames, spec.num_bins);
  kern::parallel_for(spec.num_frames, [&](std::size_t t) {
    for (int f = 0; f < spec.num_bins; ++f) {
      m(static_cast<int>(t), f) = std::log(std::norm(spec.at(static_cast<int>(t), f)) + floor_eps);
    }
  });
  return m;
}

}  // namespace aec

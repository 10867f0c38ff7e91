#include "aec/audio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aec {

double rms(const AudioClip& clip) {
  if (clip.samples.empty()) {
    throw std::invalid_argument("rms: empty clip");
  }
  double acc = 0.0;
  for (double s : clip.samples) {
    acc += s * s;
  }
  return std::sqrt(acc / static_cast<double>(clip.samples.size()));
}

std::optional<double> active_rms(const AudioClip& clip, double threshold_db) {
  if (clip.samples.empty()) {
    throw std::invalid_argument("active_rms: empty clip");
  }
  const std::size_t frame = std::max<std::size_t>(1, static_cast<std::size_t>(clip.sample_rate_hz) / 50);
  const std::size_t num_frames = (clip.samples.size() + frame - 1) / frame;

  std::vector<double> mean_sq(num_frames);
  double peak = 0.0;
  for (std::size_t i = 0; i < num_frames; ++i) {
    const std::size_t lo = i * frame;
    const std::size_t hi = std::min(lo + frame, clip.samples.size());
    double acc = 0.0;
    for (std::size_t n = lo; n < hi; ++n) {
      acc += clip.samples[n] * clip.samples[n];
    }
    mean_sq[i] = acc / static_cast<double>(hi - lo);
    peak = std::max(peak, mean_sq[i]);
  }
  if (peak <= 0.0) {
    return std::nullopt;
  }
  const double floor = peak * db_to_power_ratio(-threshold_db);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < num_frames; ++i) {
    if (mean_sq[i] > floor) {
      const std::size_t lo = i * frame;
      const std::size_t hi = std::min(lo + frame, clip.samples.size());
      for (std::size_t n = lo; n < hi; ++n) {
        acc += clip.samples[n] * clip.samples[n];
      }
      count += hi - lo;
    }
  }
  if (count == 0) {
    return std::nullopt;
  }
  return std::sqrt(acc / static_cast<double>(count));
}

AudioClip gain(const AudioClip& clip, double g) {
  AudioClip out = clip;
  for (double& s : out.samples) {
    s *= g;
  }
  return out;
}

AudioClip mix(const AudioClip& a, const AudioClip& b) {
  if (a.samples.size() != b.samples.size() || a.sample_rate_hz != b.sample_rate_hz) {
    throw std::invalid_argument("mix: length or rate mismatch");
  }
  AudioClip out = a;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] += b.samples[i];
  }
  return out;
}

AudioClip delay_clip(const AudioClip& clip, std::size_t samples) {
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.assign(clip.samples.size(), 0.0);
  for (std::size_t i = samples; i < clip.samples.size(); ++i) {
    out.samples[i] = clip.samples[i - samples];
  }
  return out;
}

AudioClip segment(const AudioClip& clip, std::size_t start, std::size_t len) {
  if (start + len > clip.samples.size()) {
    throw std::out_of_range("segment: range exceeds clip");
  }
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
  return out;
}

}  // namespace aec

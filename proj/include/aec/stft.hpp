#pragma once

#include <complex>
#include <vector>

#include "aec/audio.hpp"
#include "aec/kernels.hpp"

namespace aec {

// Analysis/synthesis framing. Defaults are the 16 kHz operating point:
// 20 ms frames, 10 ms hop, 320-point DFT.
struct StftConfig {
  enum class Window { sqrt_hann, rect };

  int frame_len = 320;
  int hop = 160;
  int dft_size = 320;
  Window window = Window::sqrt_hann;

  int bins() const { return dft_size / 2 + 1; }
  void validate() const;
};

// Analysis == synthesis window, length cfg.frame_len. The default
// square-root periodic Hann satisfies constant overlap-add at 50% hop;
// synthesis divides by the accumulated squared window either way.
std::vector<double> make_window(const StftConfig& cfg);

struct Spectrogram {
  StftConfig cfg;
  int sample_rate_hz = 16000;
  int num_frames = 0;
  int num_bins = 0;
  std::vector<std::complex<double>> data;  // frame-major

  std::complex<double>& at(int t, int f) {
    return data[static_cast<std::size_t>(t) * num_bins + f];
  }
  std::complex<double> at(int t, int f) const {
    return data[static_cast<std::size_t>(t) * num_bins + f];
  }
  std::complex<double>* row(int t) { return data.data() + static_cast<std::size_t>(t) * num_bins; }
  const std::complex<double>* row(int t) const {
    return data.data() + static_cast<std::size_t>(t) * num_bins;
  }
  Mat magnitude() const;
};

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg = {});

// Weighted overlap-add synthesis, normalized by the accumulated squared
// window so the interior reconstructs exactly.
AudioClip istft(const Spectrogram& spec);

// Entry (t, f) = ln(|X(t, f)|^2 + floor_eps).
Mat log_power(const Spectrogram& spec, double floor_eps = 1e-12);

}  // namespace aec

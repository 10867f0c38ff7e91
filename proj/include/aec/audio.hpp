#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace aec {

// Mono sample buffer. Samples are nominally in [-1, 1]; every time-domain
// signal in the toolkit travels as one of these.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

enum class WavFormat { pcm16, float32 };

// RIFF/WAVE, PCM16 or IEEE float32, little-endian. Multichannel input is
// downmixed by averaging. PCM16 samples are scaled by 1/32768.
AudioClip read_wav(const std::string& path);
void write_wav(const AudioClip& clip, const std::string& path,
               WavFormat format = WavFormat::float32);

// 16 kHz <-> 48 kHz windowed-sinc conversion; identity when rates match.
// Other rate pairs are rejected.
AudioClip resample(const AudioClip& clip, int target_rate_hz);

double rms(const AudioClip& clip);

// RMS over the samples of frames whose energy is within threshold_db of the
// loudest frame (20 ms non-overlapping frames). nullopt when no frame
// clears the threshold, i.e. the clip is silent.
std::optional<double> active_rms(const AudioClip& clip, double threshold_db = 40.0);

AudioClip gain(const AudioClip& clip, double g);
AudioClip mix(const AudioClip& a, const AudioClip& b);
// Shift right by `samples`, zero-filling the front; output length unchanged.
AudioClip delay_clip(const AudioClip& clip, std::size_t samples);
AudioClip segment(const AudioClip& clip, std::size_t start, std::size_t len);

inline double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_amp_ratio(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace aec

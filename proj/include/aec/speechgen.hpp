#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aec/audio.hpp"

namespace aec {

// Procedural source material for self-contained dataset generation: harmonic
// voiced segments with drifting pitch, noise bursts, and pauses. Not speech,
// but it has speech-like activity structure and bandwidth, which is what the
// mixing and mask-training machinery care about.
AudioClip synth_speech_like(std::uint64_t seed, double duration_s, int sample_rate_hz);

// Colored noise (white through a random one-pole lowpass), unit peak scaled
// to roughly -25 dBFS RMS.
AudioClip synth_noise(std::uint64_t seed, double duration_s, int sample_rate_hz);

struct SourcePool {
  std::vector<AudioClip> speech;
  std::vector<AudioClip> noise;
};

SourcePool make_source_pool(std::uint64_t seed, int num_speech, int num_noise,
                            double clip_len_s, int sample_rate_hz);

// Loads every .wav in a directory, resampling to the target rate.
std::vector<AudioClip> load_wav_dir(const std::string& dir, int sample_rate_hz);

}  // namespace aec

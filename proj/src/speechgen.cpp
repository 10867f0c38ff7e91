#include "aec/speechgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "aec/rng.hpp"

namespace aec {
namespace {

void normalize_level(AudioClip& clip, double target_rms) {
  double acc = 0.0;
  double peak = 0.0;
  for (double s : clip.samples) {
    acc += s * s;
    peak = std::max(peak, std::abs(s));
  }
  const double r = std::sqrt(acc / static_cast<double>(clip.samples.size()));
  if (r <= 0.0) {
    return;
  }
  double g = target_rms / r;
  if (peak * g > 0.95) {
    g = 0.95 / peak;
  }
  for (double& s : clip.samples) {
    s *= g;
  }
}

}  // namespace

AudioClip synth_speech_like(std::uint64_t seed, double duration_s, int sample_rate_hz) {
  Rng rng(seed);
  AudioClip clip;
  clip.sample_rate_hz = sample_rate_hz;
  const auto total = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  clip.samples.assign(total, 0.0);

  const double fs = sample_rate_hz;
  std::size_t pos = 0;
  double lp_state = 0.0;
  while (pos < total) {
    const double seg_s = rng.uniform(0.12, 0.45);
    const auto seg_len = std::min(total - pos,
                                  static_cast<std::size_t>(std::llround(seg_s * fs)));
    const double kind = rng.uniform();
    if (kind < 0.2) {
      // pause
      pos += seg_len;
      continue;
    }
    if (kind < 0.45) {
      // unvoiced: lowpassed noise burst
      const double alpha = rng.uniform(0.2, 0.7);
      for (std::size_t i = 0; i < seg_len; ++i) {
        lp_state += alpha * (rng.normal() - lp_state);
        const double env = std::sin(std::numbers::pi * static_cast<double>(i) / seg_len);
        clip.samples[pos + i] = 0.25 * env * lp_state;
      }
    } else {
      // voiced: harmonic stack with drifting fundamental
      const double f0 = rng.uniform(90.0, 250.0);
      const double drift = rng.uniform(-30.0, 30.0);
      const int harmonics = 3 + static_cast<int>(rng.index(10));
      std::vector<double> amp(static_cast<std::size_t>(harmonics));
      std::vector<double> phase(static_cast<std::size_t>(harmonics));
      for (int h = 0; h < harmonics; ++h) {
        amp[static_cast<std::size_t>(h)] = rng.uniform(0.4, 1.0) / (h + 1.0);
        phase[static_cast<std::size_t>(h)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      double inst_phase = 0.0;
      for (std::size_t i = 0; i < seg_len; ++i) {
        const double frac = static_cast<double>(i) / seg_len;
        const double f = f0 + drift * frac;
        inst_phase += 2.0 * std::numbers::pi * f / fs;
        double s = 0.0;
        for (int h = 0; h < harmonics; ++h) {
          const double hf = f * (h + 1);
          if (hf < 0.45 * fs) {
            s += amp[static_cast<std::size_t>(h)] *
                 std::sin((h + 1) * inst_phase + phase[static_cast<std::size_t>(h)]);
          }
        }
        const double env = std::pow(std::sin(std::numbers::pi * frac), 0.5);
        clip.samples[pos + i] = 0.3 * env * s;
      }
    }
    pos += seg_len;
  }
  normalize_level(clip, 0.08);
  return clip;
}

AudioClip synth_noise(std::uint64_t seed, double duration_s, int sample_rate_hz) {
  Rng rng(seed);
  AudioClip clip;
  clip.sample_rate_hz = sample_rate_hz;
  const auto total = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  clip.samples.resize(total);
  const double alpha = rng.uniform(0.05, 0.8);
  double state = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    state += alpha * (rng.normal() - state);
    clip.samples[i] = state;
  }
  normalize_level(clip, 0.05);
  return clip;
}

SourcePool make_source_pool(std::uint64_t seed, int num_speech, int num_noise,
                            double clip_len_s, int sample_rate_hz) {
  SourcePool pool;
  pool.speech.reserve(static_cast<std::size_t>(num_speech));
  pool.noise.reserve(static_cast<std::size_t>(num_noise));
  for (int i = 0; i < num_speech; ++i) {
    pool.speech.push_back(synth_speech_like(Rng::mix(seed, 0x5eec0000u + static_cast<std::uint64_t>(i)),
                                            clip_len_s, sample_rate_hz));
  }
  for (int i = 0; i < num_noise; ++i) {
    pool.noise.push_back(synth_noise(Rng::mix(seed, 0x401e5000u + static_cast<std::uint64_t>(i)),
                                     clip_len_s, sample_rate_hz));
  }
  return pool;
}

std::vector<AudioClip> load_wav_dir(const std::string& dir, int sample_rate_hz) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw std::runtime_error("load_wav_dir: no .wav files in " + dir);
  }
  std::vector<AudioClip> clips;
  clips.reserve(paths.size());
  for (const auto& p : paths) {
    clips.push_back(resample(read_wav(p.string()), sample_rate_hz));
  }
  return clips;
}

}  // namespace aec

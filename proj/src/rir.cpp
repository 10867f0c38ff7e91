#include "aec/rir.hpp"

#include <cmath>
#include <stdexcept>

#include "aec/rng.hpp"

namespace aec {

AudioClip generate_rir(const RirSpec& spec, int sample_rate_hz) {
  if (spec.rt60_s <= 0.0) {
    throw std::invalid_argument("generate_rir: rt60_s must be positive");
  }
  if (!spec.allow_any_rt60 && (spec.rt60_s < 0.2 || spec.rt60_s > 1.2)) {
    throw std::invalid_argument("generate_rir: rt60_s outside [0.2, 1.2] without override");
  }
  if (spec.length_s < spec.rt60_s) {
    throw std::invalid_argument("generate_rir: length_s must cover rt60_s");
  }
  if (spec.direct_delay_ms < 0.0) {
    throw std::invalid_argument("generate_rir: negative direct delay");
  }

  const double fs = sample_rate_hz;
  const auto d0 = static_cast<std::size_t>(std::llround(spec.direct_delay_ms / 1000.0 * fs));
  const auto tail_len = static_cast<std::size_t>(std::llround(spec.length_s * fs));

  AudioClip rir;
  rir.sample_rate_hz = sample_rate_hz;
  rir.samples.assign(d0 + tail_len + 1, 0.0);
  rir.samples[d0] = 1.0;  // direct path, unit gain

  // Amplitude envelope 10^(-3 t / rt60) gives a 60 dB energy drop at rt60.
  // The tail level targets a 0 dB direct-to-reverberant ratio, capped so
  // vanishing rt60 degenerates to a bare impulse rather than a noise spike.
  std::vector<double> env(tail_len);
  double env_energy = 0.0;
  for (std::size_t n = 1; n <= tail_len; ++n) {
    const double t = static_cast<double>(n) / fs;
    env[n - 1] = std::pow(10.0, -3.0 * t / spec.rt60_s);
    env_energy += env[n - 1] * env[n - 1];
  }
  const double tail_gain =
      env_energy > 0.0 ? std::min(0.5, 1.0 / std::sqrt(env_energy)) : 0.5;

  Rng rng(spec.seed);
  for (std::size_t n = 1; n <= tail_len; ++n) {
    rir.samples[d0 + n] = tail_gain * env[n - 1] * rng.normal();
  }
  return rir;
}

}  // namespace aec

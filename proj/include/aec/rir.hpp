#pragma once

#include <cstdint>

#include "aec/audio.hpp"

namespace aec {

// Synthetic room impulse response: a unit direct-path impulse followed by
// exponentially decaying Gaussian noise whose energy slope hits the target
// reverberation time.
struct RirSpec {
  double rt60_s = 0.3;
  double length_s = 0.4;  // tail length; must cover at least one rt60
  double direct_delay_ms = 0.0;
  std::uint64_t seed = 0;
  // rt60 outside [0.2, 1.2] is rejected unless explicitly allowed.
  bool allow_any_rt60 = false;
};

AudioClip generate_rir(const RirSpec& spec, int sample_rate_hz);

}  // namespace aec

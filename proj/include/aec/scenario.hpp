#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "aec/audio.hpp"
#include "aec/rir.hpp"

namespace aec {

// Memoryless loudspeaker distortion applied to the far-end signal before the
// echo path.
struct NonlinearitySpec {
  enum class Kind { none, hard_clip, sigmoid };
  Kind kind = Kind::none;
  double clip_level = 0.5;    // hard_clip only, in (0, 1]
  double sigmoid_slope = 4.0; // sigmoid only, > 0
};

AudioClip apply_nonlinearity(const AudioClip& x, const NonlinearitySpec& nl);

// Recording stressors: sudden delay changes, far-end level changes, and
// dropped (choppy) capture segments.
struct PerturbationSpec {
  enum class Kind { delay_jump, gain_variation, glitch };
  Kind kind = Kind::delay_jump;
  double at_s = 0.0;           // delay_jump / glitch start time
  double delay_delta_ms = 0.0; // delay_jump
  double duration_s = 0.0;     // glitch
  std::vector<std::pair<double, double>> envelope;  // gain_variation (time_s, gain)
};

// Concrete parameters of one synthetic scenario. Every random choice made
// during synthesis derives from `seed`, so a spec regenerates its bundle
// bit-for-bit.
struct ScenarioSpec {
  std::uint64_t seed = 0;
  double ser_db = 0.0;
  double snr_db = std::numeric_limits<double>::infinity();  // +inf = no noise
  NonlinearitySpec nonlinearity;
  bool use_noisy_speech = false;
  double near_end_speech_s = 5.0;
  double clip_len_s = 10.0;
  RirSpec rir;
  double extra_delay_ms = 0.0;
  std::optional<double> near_start_s;  // chosen during synthesis when unset
  std::vector<PerturbationSpec> perturbations;
};

// The scenario quadruple plus its ground truth. All clips share length and
// rate; mic == echo + near_end_speech + noise() sample-wise.
struct ScenarioBundle {
  AudioClip far_end;
  AudioClip echo;
  AudioClip near_end_speech;
  AudioClip mic;
  ScenarioSpec spec;

  AudioClip noise() const;  // mic - echo - near_end_speech
};

// Sampling ranges for scenario parameters.
struct SamplerConfig {
  std::pair<double, double> ser_db_range{-10.0, 10.0};
  std::pair<double, double> snr_db_range{0.0, 40.0};
  double p_nonlinear = 0.8;
  double p_sigmoid_given_nonlinear = 0.5;
  std::pair<double, double> clip_level_range{0.2, 0.9};
  std::pair<double, double> sigmoid_slope_range{2.0, 8.0};
  double p_noisy_speech = 0.5;
  std::pair<double, double> near_speech_s_range{3.0, 7.0};
  double clip_len_s = 10.0;
  std::pair<double, double> rt60_s_range{0.2, 1.2};
  std::pair<double, double> direct_delay_ms_range{0.0, 20.0};
  std::pair<double, double> extra_delay_ms_range{10.0, 500.0};
  bool add_noise = true;
};

ScenarioSpec sample_scenario_spec(const SamplerConfig& cfg, std::uint64_t master_seed,
                                  std::uint64_t index);

// Scales `echo` so that active_rms(near_speech)^2 / active_rms(echo')^2
// matches ser_db. Returns the scaled echo and the achieved ratio.
std::pair<AudioClip, double> mix_at_ser(const AudioClip& near_speech, const AudioClip& echo,
                                        double ser_db);

// Noise component scaled against the active power of `signal`.
AudioClip noise_at_snr(const AudioClip& signal, const AudioClip& noise, double snr_db);
// signal + noise_at_snr(signal, noise, snr_db).
AudioClip mix_at_snr(const AudioClip& signal, const AudioClip& noise, double snr_db);

ScenarioBundle synthesize_scenario(const ScenarioSpec& spec, const AudioClip& far_source,
                                   const AudioClip& near_source, const AudioClip& noise_source);

ScenarioBundle apply_perturbations(const ScenarioBundle& bundle);

// Recording protocols: far end played back twice, optionally with a silent
// gap (near-end-only segment) in the middle.
AudioClip build_fest_clip(const AudioClip& far_end);
AudioClip build_dt_clip(const AudioClip& far_end, double gap_s);

}  // namespace aec

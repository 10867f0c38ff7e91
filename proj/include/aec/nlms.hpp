#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aec/audio.hpp"

namespace aec {

struct NlmsConfig {
  int num_taps = 3200;  // 200 ms at 16 kHz
  double step_size = 0.5;
  double regularization_eps = 1e-6;
  bool freeze_on_near_end = false;

  void validate() const;
};

// Sample-by-sample NLMS echo canceller. Single-stream mutable state; run one
// instance per signal pair, never share across threads.
class AecState {
 public:
  explicit AecState(const NlmsConfig& cfg);

  // Returns (residual, echo_estimate); residual + echo_estimate == mic.
  std::pair<double, double> step(double mic, double loopback, bool near_active = false);

  const std::vector<double>& taps() const { return taps_; }
  const NlmsConfig& config() const { return cfg_; }

 private:
  NlmsConfig cfg_;
  std::vector<double> taps_;
  std::vector<double> history_;  // mirrored ring: history_[pos..pos+taps) is newest-first
  std::size_t pos_;
  double power_;
};

struct NlmsResult {
  AudioClip residual;
  AudioClip echo_estimate;
  std::vector<double> final_taps;
};

// near_active, when provided, must have one flag per sample; adaptation
// freezes where the flag is set and cfg.freeze_on_near_end is on.
NlmsResult nlms_process(const AudioClip& mic, const AudioClip& loopback,
                        const NlmsConfig& cfg = {},
                        std::span<const std::uint8_t> near_active = {});

struct DelayEstimate {
  double delay_ms = 0.0;
  double confidence = 0.0;  // GCC-PHAT peak, 1.0 for a perfect pure delay
};

// GCC-PHAT delay of the echo in `mic` relative to `loopback`, refined to
// sub-sample precision by parabolic interpolation. nullopt when no peak
// clears min_confidence (no echo detected).
std::optional<DelayEstimate> estimate_delay(const AudioClip& mic, const AudioClip& loopback,
                                            double max_delay_ms = 500.0,
                                            double min_confidence = 0.03);

}  // namespace aec

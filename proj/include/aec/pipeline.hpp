#pragma once

#include <optional>
#include <string>

#include "aec/model.hpp"
#include "aec/nlms.hpp"

namespace aec {

// An ordered subset of {delay_align, nlms, neural}. The linear stage feeds
// its residual to the suppressor; the suppressor sees the delay-aligned far
// end when alignment ran.
struct PipelineSpec {
  bool delay_align = false;
  bool nlms = false;
  bool neural = false;
  std::string weights_path;
  NlmsConfig nlms_cfg;
  double max_delay_ms = 500.0;
  bool normalize_features = false;

  static PipelineSpec parse(const std::string& stages_csv);
  void validate() const;
  std::string stages_string() const;
};

// Per-sample activity flags derived from a ground-truth near-end clip, for
// freezing NLMS adaptation on synthetic data.
std::vector<std::uint8_t> near_activity_flags(const AudioClip& near_speech);

struct ProcessOutput {
  AudioClip processed;
  double processing_s = 0.0;  // stage wall clock, file I/O excluded
  std::optional<double> delay_ms;
};

// Runs the configured stages at 16 kHz (resampling in and out when needed).
// `weights` may be null unless spec.neural is set. `near_active` (one flag
// per 16 kHz sample) freezes NLMS adaptation where set, when the NLMS
// config asks for it.
ProcessOutput run_pipeline(const AudioClip& mic, const AudioClip& loopback,
                           const PipelineSpec& spec, const ModelWeights* weights,
                           std::span<const std::uint8_t> near_active = {});

}  // namespace aec

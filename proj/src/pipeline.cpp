#include "aec/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aec {

PipelineSpec PipelineSpec::parse(const std::string& stages_csv) {
  PipelineSpec spec;
  std::stringstream ss(stages_csv);
  std::string stage;
  bool any = false;
  while (std::getline(ss, stage, ',')) {
    if (stage.empty()) {
      continue;
    }
    any = true;
    if (stage == "delay_align") {
      spec.delay_align = true;
    } else if (stage == "nlms") {
      spec.nlms = true;
    } else if (stage == "neural") {
      spec.neural = true;
    } else {
      throw std::invalid_argument("PipelineSpec: unknown stage '" + stage + "'");
    }
  }
  if (!any) {
    throw std::invalid_argument("PipelineSpec: empty stage list");
  }
  return spec;
}

void PipelineSpec::validate() const {
  if (!delay_align && !nlms && !neural) {
    throw std::invalid_argument("PipelineSpec: empty stage list");
  }
  if (neural && weights_path.empty()) {
    throw std::invalid_argument("PipelineSpec: neural stage requires weights");
  }
}

std::string PipelineSpec::stages_string() const {
  std::string s;
  auto add = [&](const char* name) {
    if (!s.empty()) {
      s += ',';
    }
    s += name;
  };
  if (delay_align) add("delay_align");
  if (nlms) add("nlms");
  if (neural) add("neural");
  return s;
}

std::vector<std::uint8_t> near_activity_flags(const AudioClip& near_speech) {
  double peak = 0.0;
  for (double s : near_speech.samples) {
    peak = std::max(peak, std::abs(s));
  }
  const double floor = 1e-4 * peak;
  std::vector<std::uint8_t> flags(near_speech.samples.size(), 0);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    flags[i] = std::abs(near_speech.samples[i]) > floor ? 1 : 0;
  }
  return flags;
}

ProcessOutput run_pipeline(const AudioClip& mic, const AudioClip& loopback,
                           const PipelineSpec& spec, const ModelWeights* weights,
                           std::span<const std::uint8_t> near_active) {
  if (!spec.delay_align && !spec.nlms && !spec.neural) {
    throw std::invalid_argument("run_pipeline: empty stage list");
  }
  if (spec.neural && weights == nullptr) {
    throw std::invalid_argument("run_pipeline: neural stage requires weights");
  }
  if (mic.sample_rate_hz != loopback.sample_rate_hz) {
    throw std::invalid_argument("run_pipeline: rate mismatch");
  }

  const int source_rate = mic.sample_rate_hz;
  const auto start = std::chrono::steady_clock::now();

  AudioClip cur = source_rate == 16000 ? mic : resample(mic, 16000);
  AudioClip far = source_rate == 16000 ? loopback : resample(loopback, 16000);

  ProcessOutput out;
  if (spec.delay_align) {
    const auto est = estimate_delay(cur, far, spec.max_delay_ms);
    if (est) {
      out.delay_ms = est->delay_ms;
      const auto shift = static_cast<std::size_t>(std::llround(est->delay_ms / 1000.0 * 16000.0));
      far = delay_clip(far, shift);
    }
  }
  if (spec.nlms) {
    cur = nlms_process(cur, far, spec.nlms_cfg, near_active).residual;
  }
  if (spec.neural) {
    cur = enhance(cur, far, *weights, StftConfig{}, spec.normalize_features);
  }

  if (source_rate != 16000) {
    cur = resample(cur, source_rate);
    cur.samples.resize(mic.samples.size(), 0.0);
  }
  const auto stop = std::chrono::steady_clock::now();
  out.processed = std::move(cur);
  out.processing_s = std::chrono::duration<double>(stop - start).count();
  return out;
}

}  // namespace aec

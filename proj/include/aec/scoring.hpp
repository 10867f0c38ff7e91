#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "aec/audio.hpp"
#include "aec/metrics.hpp"

namespace aec {

struct ClipScore {
  std::string id;
  std::optional<double> echo_dmos;   // fest / dt responses
  std::optional<double> other_dmos;  // fest / dt responses
  std::optional<double> mos;         // nest responses
  bool unavailable = false;
  std::string note;
};

// Client for an external MOS-style scoring service. Contract: POST
// <endpoint>/score with a JSON body
//   {"id", "scenario_kind", "sample_rate_hz",
//    "far_end", "mic", "processed"}   (audio as base64 float32 LE)
// expecting {"echo_dmos", "other_dmos"} for fest/dt or {"mos"} for nest.
// Transient failures are retried with exponential backoff; after the last
// attempt the clip is marked unavailable instead of failing the batch. A
// well-formed HTTP response with a malformed body throws.
class ScoreClient {
 public:
  explicit ScoreClient(std::string endpoint, std::string api_key = "",
                       int max_attempts = 3, double backoff_s = 0.2);

  ClipScore submit(const std::string& id, ScenarioKind kind, const AudioClip& far,
                   const AudioClip& mic, const AudioClip& processed);

 private:
  std::string host_;
  int port_ = 80;
  std::string api_key_;
  int max_attempts_;
  double backoff_s_;
};

std::string encode_base64(std::span<const std::uint8_t> bytes);
std::string clip_to_base64(const AudioClip& clip);

// Reads every {id}.txt in a directory into tokenized transcripts.
std::map<std::string, Transcript> load_transcript_dir(const std::string& dir);

}  // namespace aec

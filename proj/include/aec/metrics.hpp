#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aec/audio.hpp"

namespace aec {

struct ErleResult {
  double db = 0.0;
  bool infinite = false;  // residual carried zero energy
};

// Echo return loss enhancement: 10*log10(E[mic^2] / E[residual^2]), meant
// for far-end single-talk regions. An optional [start, end) region in
// seconds restricts the averages.
ErleResult erle_db(const AudioClip& mic, const AudioClip& residual,
                   std::optional<std::pair<double, double>> region_s = std::nullopt);

struct Transcript {
  std::vector<std::string> words;
};

// Lowercases, strips punctuation, splits on whitespace.
Transcript tokenize(const std::string& text);
Transcript load_transcript(const std::string& path);

// Word accuracy = 1 - (S + D + I) / N over a minimum-edit-distance
// alignment with uniform costs. Can go negative; not clamped.
double wacc(const Transcript& reference, const Transcript& hypothesis);

struct ChallengeScores {
  double fe_st_echo_dmos = 1.0;
  double ne_st_mos = 1.0;
  double dt_echo_dmos = 1.0;
  double dt_other_dmos = 1.0;
  double wacc = 0.0;
};

// M = [ (FE_ST-1)/4 + (NE_ST-1)/4 + (DT_echo-1)/4 + (DT_other-1)/4 + WAcc ] / 5
double challenge_metric(const ChallengeScores& s);

struct Rt60Estimate {
  double rt60_s = 0.0;
  bool reliable = false;
};

// Backward (Schroeder) energy integration, least-squares fit of the decay
// curve between -5 and -25 dB, extrapolated to 60 dB.
Rt60Estimate estimate_rt60(const AudioClip& rir);

double pcc(std::span<const double> x, std::span<const double> y);
// Spearman: PCC of average ranks (ties get the mean rank).
double srcc(std::span<const double> x, std::span<const double> y);

enum class ScenarioKind { fest, dt, nest };

// Scoring region in seconds: second half for far-end single talk, final
// third for double talk, the whole clip for near-end single talk.
std::pair<double, double> eval_region(double clip_len_s, ScenarioKind kind);

ScenarioKind scenario_kind_from_string(const std::string& s);
std::string to_string(ScenarioKind kind);

}  // namespace aec

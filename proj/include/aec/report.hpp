#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aec/metrics.hpp"

namespace aec {

struct ClipReport {
  std::string id;
  double erle_db = 0.0;
  bool erle_infinite = false;
  double region_start_s = 0.0;
  double region_end_s = 0.0;
  std::optional<double> wacc;
  bool wacc_missing = false;  // transcripts requested but absent for this clip
  std::optional<double> rtf;
};

struct EvalReport {
  std::vector<ClipReport> clips;
  double mean_erle_db = 0.0;  // finite rows only
  int infinite_erle_count = 0;
  std::optional<double> mean_wacc;
  std::optional<double> mean_rtf;
  std::optional<ChallengeScores> scores;
  std::optional<double> challenge_m;
};

struct EvaluateOptions {
  // Region override; by default the ground-truth far-end-only interval of
  // each scenario is used (longest stretch without near-end speech).
  std::optional<ScenarioKind> region_kind;
  std::string transcripts_ref_dir;
  std::string transcripts_hyp_dir;
  std::string scores_path;
  std::string timings_path;
};

EvalReport evaluate_manifest(const std::string& dataset_dir, const std::string& processed_dir,
                             const EvaluateOptions& options = {});

void write_report(const EvalReport& report, const std::string& path);
EvalReport read_report(const std::string& path);
void print_report(const EvalReport& report, std::ostream& os);

}  // namespace aec

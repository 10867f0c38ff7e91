#include "aec/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aec/manifest.hpp"
#include "aec/scoring.hpp"

namespace aec {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Longest interval without near-end speech, from the recorded ground truth.
// Falls back to the full clip when the complement is too short to score.
std::pair<double, double> far_end_only_region(const ScenarioSpec& spec) {
  if (!spec.near_start_s) {
    return {0.0, spec.clip_len_s};
  }
  const double near_lo = *spec.near_start_s;
  const double near_hi = near_lo + spec.near_end_speech_s;
  const double head = near_lo;
  const double tail = spec.clip_len_s - near_hi;
  constexpr double kMinRegion = 0.5;
  if (head < kMinRegion && tail < kMinRegion) {
    return {0.0, spec.clip_len_s};
  }
  return head >= tail ? std::pair{0.0, near_lo} : std::pair{near_hi, spec.clip_len_s};
}

std::map<std::string, std::pair<double, double>> load_timings(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("evaluate: cannot open timings file " + path);
  }
  json j = json::parse(f);
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& c : j.at("clips")) {
    out[c.at("id").get<std::string>()] = {c.at("processing_s").get<double>(),
                                          c.at("duration_s").get<double>()};
  }
  return out;
}

struct ScoresFile {
  std::optional<double> fe_st_echo_dmos, ne_st_mos, dt_echo_dmos, dt_other_dmos, wacc;
};

ScoresFile load_scores(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("evaluate: cannot open scores file " + path);
  }
  json j = json::parse(f);
  const json& agg = j.at("aggregate");
  ScoresFile s;
  auto get = [&](const char* key) -> std::optional<double> {
    if (agg.contains(key) && !agg.at(key).is_null()) {
      return agg.at(key).get<double>();
    }
    return std::nullopt;
  };
  s.fe_st_echo_dmos = get("fe_st_echo_dmos");
  s.ne_st_mos = get("ne_st_mos");
  s.dt_echo_dmos = get("dt_echo_dmos");
  s.dt_other_dmos = get("dt_other_dmos");
  s.wacc = get("wacc");
  return s;
}

}  // namespace

EvalReport evaluate_manifest(const std::string& dataset_dir, const std::string& processed_dir,
                             const EvaluateOptions& options) {
  const Manifest manifest = load_manifest(dataset_dir);

  std::map<std::string, Transcript> refs;
  std::map<std::string, Transcript> hyps;
  const bool with_wacc = !options.transcripts_ref_dir.empty();
  if (with_wacc) {
    refs = load_transcript_dir(options.transcripts_ref_dir);
    hyps = load_transcript_dir(options.transcripts_hyp_dir);
  }
  std::map<std::string, std::pair<double, double>> timings;
  if (!options.timings_path.empty()) {
    timings = load_timings(options.timings_path);
  }

  EvalReport report;
  double erle_sum = 0.0;
  int erle_finite = 0;
  double wacc_sum = 0.0;
  int wacc_count = 0;
  double rtf_sum = 0.0;
  int rtf_count = 0;

  for (const auto& entry : manifest.entries) {
    const fs::path processed_path = fs::path(processed_dir) / (entry.id + "_processed.wav");
    if (!fs::exists(processed_path)) {
      throw std::runtime_error("evaluate: missing processed file " + processed_path.string());
    }
    const AudioClip mic = read_wav((fs::path(dataset_dir) / entry.mic_file).string());
    AudioClip processed = read_wav(processed_path.string());
    if (processed.samples.size() != mic.samples.size()) {
      throw std::runtime_error("evaluate: processed length mismatch for clip " + entry.id);
    }

    ClipReport clip;
    clip.id = entry.id;
    std::pair<double, double> region =
        options.region_kind ? eval_region(mic.duration_s(), *options.region_kind)
                            : far_end_only_region(entry.spec);
    if (region.second > mic.duration_s() + 1e-9) {
      throw std::runtime_error("evaluate: region exceeds clip " + entry.id);
    }
    clip.region_start_s = region.first;
    clip.region_end_s = region.second;

    const ErleResult erle = erle_db(mic, processed, region);
    clip.erle_db = erle.db;
    clip.erle_infinite = erle.infinite;
    if (erle.infinite) {
      ++report.infinite_erle_count;
    } else {
      erle_sum += erle.db;
      ++erle_finite;
    }

    if (with_wacc) {
      const auto r = refs.find(entry.id);
      const auto h = hyps.find(entry.id);
      if (r == refs.end() || h == hyps.end()) {
        clip.wacc_missing = true;
      } else {
        clip.wacc = wacc(r->second, h->second);
        wacc_sum += *clip.wacc;
        ++wacc_count;
      }
    }
    const auto t = timings.find(entry.id);
    if (t != timings.end() && t->second.second > 0.0) {
      clip.rtf = t->second.first / t->second.second;
      rtf_sum += *clip.rtf;
      ++rtf_count;
    }
    report.clips.push_back(std::move(clip));
  }

  report.mean_erle_db = erle_finite > 0 ? erle_sum / erle_finite : 0.0;
  if (wacc_count > 0) {
    report.mean_wacc = wacc_sum / wacc_count;
  }
  if (rtf_count > 0) {
    report.mean_rtf = rtf_sum / rtf_count;
  }

  if (!options.scores_path.empty()) {
    const ScoresFile s = load_scores(options.scores_path);
    const std::optional<double> wacc_value = s.wacc ? s.wacc : report.mean_wacc;
    if (s.fe_st_echo_dmos && s.ne_st_mos && s.dt_echo_dmos && s.dt_other_dmos && wacc_value) {
      ChallengeScores cs;
      cs.fe_st_echo_dmos = *s.fe_st_echo_dmos;
      cs.ne_st_mos = *s.ne_st_mos;
      cs.dt_echo_dmos = *s.dt_echo_dmos;
      cs.dt_other_dmos = *s.dt_other_dmos;
      cs.wacc = *wacc_value;
      report.scores = cs;
      report.challenge_m = challenge_metric(cs);
    }
  }
  return report;
}

namespace {

json clip_to_json(const ClipReport& c) {
  json j;
  j["id"] = c.id;
  if (c.erle_infinite) {
    j["erle_db"] = nullptr;
    j["erle_infinite"] = true;
  } else {
    j["erle_db"] = c.erle_db;
    j["erle_infinite"] = false;
  }
  j["region_s"] = {c.region_start_s, c.region_end_s};
  if (c.wacc) {
    j["wacc"] = *c.wacc;
  }
  if (c.wacc_missing) {
    j["wacc_missing"] = true;
  }
  if (c.rtf) {
    j["rtf"] = *c.rtf;
  }
  return j;
}

ClipReport clip_from_json(const json& j) {
  ClipReport c;
  c.id = j.at("id").get<std::string>();
  c.erle_infinite = j.at("erle_infinite").get<bool>();
  if (!c.erle_infinite) {
    c.erle_db = j.at("erle_db").get<double>();
  } else {
    c.erle_db = std::numeric_limits<double>::infinity();
  }
  c.region_start_s = j.at("region_s").at(0).get<double>();
  c.region_end_s = j.at("region_s").at(1).get<double>();
  if (j.contains("wacc")) {
    c.wacc = j.at("wacc").get<double>();
  }
  c.wacc_missing = j.value("wacc_missing", false);
  if (j.contains("rtf")) {
    c.rtf = j.at("rtf").get<double>();
  }
  return c;
}

}  // namespace

void write_report(const EvalReport& report, const std::string& path) {
  json j;
  json clips = json::array();
  for (const auto& c : report.clips) {
    clips.push_back(clip_to_json(c));
  }
  j["clips"] = std::move(clips);
  json agg;
  agg["mean_erle_db"] = report.mean_erle_db;
  agg["infinite_erle_count"] = report.infinite_erle_count;
  if (report.mean_wacc) {
    agg["mean_wacc"] = *report.mean_wacc;
  }
  if (report.mean_rtf) {
    agg["mean_rtf"] = *report.mean_rtf;
  }
  if (report.scores) {
    agg["scores"] = {{"fe_st_echo_dmos", report.scores->fe_st_echo_dmos},
                     {"ne_st_mos", report.scores->ne_st_mos},
                     {"dt_echo_dmos", report.scores->dt_echo_dmos},
                     {"dt_other_dmos", report.scores->dt_other_dmos},
                     {"wacc", report.scores->wacc}};
  }
  if (report.challenge_m) {
    agg["challenge_m"] = *report.challenge_m;
  }
  j["aggregate"] = std::move(agg);

  std::ofstream f(path, std::ios::trunc);
  if (!f) {
    throw std::runtime_error("write_report: cannot open " + path);
  }
  f << j.dump(2) << '\n';
}

EvalReport read_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("read_report: cannot open " + path);
  }
  json j = json::parse(f);
  EvalReport r;
  for (const auto& c : j.at("clips")) {
    r.clips.push_back(clip_from_json(c));
  }
  const json& agg = j.at("aggregate");
  r.mean_erle_db = agg.at("mean_erle_db").get<double>();
  r.infinite_erle_count = agg.at("infinite_erle_count").get<int>();
  if (agg.contains("mean_wacc")) {
    r.mean_wacc = agg.at("mean_wacc").get<double>();
  }
  if (agg.contains("mean_rtf")) {
    r.mean_rtf = agg.at("mean_rtf").get<double>();
  }
  if (agg.contains("scores")) {
    ChallengeScores cs;
    cs.fe_st_echo_dmos = agg.at("scores").at("fe_st_echo_dmos").get<double>();
    cs.ne_st_mos = agg.at("scores").at("ne_st_mos").get<double>();
    cs.dt_echo_dmos = agg.at("scores").at("dt_echo_dmos").get<double>();
    cs.dt_other_dmos = agg.at("scores").at("dt_other_dmos").get<double>();
    cs.wacc = agg.at("scores").at("wacc").get<double>();
    r.scores = cs;
  }
  if (agg.contains("challenge_m")) {
    r.challenge_m = agg.at("challenge_m").get<double>();
  }
  return r;
}

void print_report(const EvalReport& report, std::ostream& os) {
  char line[160];
  os << "clip        ERLE dB     region s        WAcc     RTF\n";
  for (const auto& c : report.clips) {
    std::string erle = c.erle_infinite ? "inf" : [&] {
      char b[32];
      std::snprintf(b, sizeof(b), "%.2f", c.erle_db);
      return std::string(b);
    }();
    std::string wacc_s = c.wacc ? [&] {
      char b[32];
      std::snprintf(b, sizeof(b), "%.3f", *c.wacc);
      return std::string(b);
    }() : (c.wacc_missing ? "missing" : "-");
    std::string rtf_s = c.rtf ? [&] {
      char b[32];
      std::snprintf(b, sizeof(b), "%.3f", *c.rtf);
      return std::string(b);
    }() : "-";
    std::snprintf(line, sizeof(line), "%-10s %8s  [%6.2f,%6.2f]  %7s  %6s\n", c.id.c_str(),
                  erle.c_str(), c.region_start_s, c.region_end_s, wacc_s.c_str(), rtf_s.c_str());
    os << line;
  }
  std::snprintf(line, sizeof(line), "mean ERLE %.2f dB (%d clips at +inf)\n", report.mean_erle_db,
                report.infinite_erle_count);
  os << line;
  if (report.mean_wacc) {
    std::snprintf(line, sizeof(line), "mean WAcc %.3f\n", *report.mean_wacc);
    os << line;
  }
  if (report.mean_rtf) {
    std::snprintf(line, sizeof(line), "mean RTF %.3f\n", *report.mean_rtf);
    os << line;
  }
  if (report.challenge_m) {
    std::snprintf(line, sizeof(line), "challenge metric M %.4f\n", *report.challenge_m);
    os << line;
  }
}

}  // namespace aec

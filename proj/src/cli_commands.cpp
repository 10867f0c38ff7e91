#include "aec/cli_commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aec/manifest.hpp"
#include "aec/pipeline.hpp"
#include "aec/rng.hpp"
#include "aec/scoring.hpp"
#include "aec/speechgen.hpp"
#include "aec/train.hpp"

namespace aec {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::pair<double, double> range_from_json(const json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 2) {
    throw std::runtime_error(std::string("sampler config: '") + key + "' must be [lo, hi]");
  }
  return {arr.at(0).get<double>(), arr.at(1).get<double>()};
}

}  // namespace

SamplerConfig load_sampler_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("cannot open sampler config " + path);
  }
  json j = json::parse(f);
  const std::set<std::string> known = {
      "ser_db_range",      "snr_db_range",        "p_nonlinear",
      "p_sigmoid_given_nonlinear", "clip_level_range", "sigmoid_slope_range",
      "p_noisy_speech",    "near_speech_s_range", "clip_len_s",
      "rt60_s_range",      "direct_delay_ms_range", "extra_delay_ms_range",
      "add_noise"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw std::runtime_error("sampler config: unknown key '" + key + "'");
    }
  }
  SamplerConfig cfg;
  if (j.contains("ser_db_range")) cfg.ser_db_range = range_from_json(j, "ser_db_range");
  if (j.contains("snr_db_range")) cfg.snr_db_range = range_from_json(j, "snr_db_range");
  if (j.contains("p_nonlinear")) cfg.p_nonlinear = j.at("p_nonlinear").get<double>();
  if (j.contains("p_sigmoid_given_nonlinear")) {
    cfg.p_sigmoid_given_nonlinear = j.at("p_sigmoid_given_nonlinear").get<double>();
  }
  if (j.contains("clip_level_range")) cfg.clip_level_range = range_from_json(j, "clip_level_range");
  if (j.contains("sigmoid_slope_range")) {
    cfg.sigmoid_slope_range = range_from_json(j, "sigmoid_slope_range");
  }
  if (j.contains("p_noisy_speech")) cfg.p_noisy_speech = j.at("p_noisy_speech").get<double>();
  if (j.contains("near_speech_s_range")) {
    cfg.near_speech_s_range = range_from_json(j, "near_speech_s_range");
  }
  if (j.contains("clip_len_s")) cfg.clip_len_s = j.at("clip_len_s").get<double>();
  if (j.contains("rt60_s_range")) cfg.rt60_s_range = range_from_json(j, "rt60_s_range");
  if (j.contains("direct_delay_ms_range")) {
    cfg.direct_delay_ms_range = range_from_json(j, "direct_delay_ms_range");
  }
  if (j.contains("extra_delay_ms_range")) {
    cfg.extra_delay_ms_range = range_from_json(j, "extra_delay_ms_range");
  }
  if (j.contains("add_noise")) cfg.add_noise = j.at("add_noise").get<bool>();
  return cfg;
}

int cmd_generate(const GenerateOptions& options) {
  if (options.out_dir.empty()) {
    throw std::invalid_argument("generate: --out is required");
  }
  fs::create_directories(options.out_dir);

  SamplerConfig sampler = options.config_path.empty() ? SamplerConfig{}
                                                      : load_sampler_config(options.config_path);

  SourcePool pool;
  const double source_len_s = std::max(sampler.clip_len_s + 2.0, 12.0);
  if (!options.speech_dir.empty()) {
    pool.speech = load_wav_dir(options.speech_dir, options.sample_rate_hz);
  } else {
    pool.speech = make_source_pool(options.seed, options.pool_speech, 0, source_len_s,
                                   options.sample_rate_hz)
                      .speech;
  }
  if (!options.noise_dir.empty()) {
    pool.noise = load_wav_dir(options.noise_dir, options.sample_rate_hz);
  } else {
    pool.noise = make_source_pool(options.seed, 0, options.pool_noise, source_len_s,
                                  options.sample_rate_hz)
                     .noise;
  }
  if (pool.speech.size() < 2) {
    throw std::runtime_error("generate: need at least two speech sources");
  }

  Manifest manifest;
  manifest.sample_rate_hz = options.sample_rate_hz;
  manifest.entries.resize(static_cast<std::size_t>(options.count));

  kern::parallel_for(options.count, [&](std::size_t i) {
    ScenarioSpec spec = sample_scenario_spec(sampler, options.seed, i);
    Rng src_rng = Rng::child(options.seed, 0x900dF00dULL + i);
    const std::size_t far_idx = src_rng.index(pool.speech.size());
    std::size_t near_idx = src_rng.index(pool.speech.size() - 1);
    if (near_idx >= far_idx) {
      ++near_idx;  // distinct talkers
    }
    const std::size_t noise_idx = src_rng.index(pool.noise.size());
    const ScenarioBundle bundle = synthesize_scenario(spec, pool.speech[far_idx],
                                                      pool.speech[near_idx],
                                                      pool.noise[noise_idx]);
    const std::string split =
        static_cast<int>(i) < options.validation_count ? "validation" : "train";
    manifest.entries[i] =
        write_bundle_wavs(bundle, options.out_dir, static_cast<int>(i), split, options.format);
  });

  save_manifest(manifest, options.out_dir);
  std::printf("generated %d scenarios in %s\n", options.count, options.out_dir.c_str());
  return 0;
}

int cmd_process(const ProcessCliOptions& options) {
  const Manifest manifest = load_manifest(options.dataset_dir);
  fs::create_directories(options.out_dir);

  PipelineSpec spec = PipelineSpec::parse(options.pipeline_csv);
  spec.weights_path = options.weights_path;
  spec.normalize_features = options.normalize_features;
  spec.nlms_cfg.freeze_on_near_end = options.freeze_on_near_end;
  spec.validate();

  ModelWeights weights;
  if (spec.neural) {
    weights = load_weights(spec.weights_path);
  }

  struct Timing {
    std::string id;
    double processing_s;
    double duration_s;
  };
  std::vector<Timing> timings(manifest.entries.size());

  kern::parallel_for(static_cast<std::ptrdiff_t>(manifest.entries.size()), [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    const AudioClip mic = read_wav((fs::path(options.dataset_dir) / entry.mic_file).string());
    const AudioClip far = read_wav((fs::path(options.dataset_dir) / entry.far_end_file).string());
    std::vector<std::uint8_t> flags;
    if (options.freeze_on_near_end) {
      AudioClip near = read_wav((fs::path(options.dataset_dir) / entry.near_end_file).string());
      if (near.sample_rate_hz != 16000) {
        near = resample(near, 16000);
      }
      flags = near_activity_flags(near);
    }
    const ProcessOutput out =
        run_pipeline(mic, far, spec, spec.neural ? &weights : nullptr, flags);
    write_wav(out.processed, (fs::path(options.out_dir) / (entry.id + "_processed.wav")).string(),
              WavFormat::float32);
    timings[i] = {entry.id, out.processing_s, mic.duration_s()};
  });

  json j;
  j["pipeline"] = spec.stages_string();
  json clips = json::array();
  for (const auto& t : timings) {
    clips.push_back({{"id", t.id},
                     {"processing_s", t.processing_s},
                     {"duration_s", t.duration_s},
                     {"rtf", t.processing_s / t.duration_s}});
  }
  j["clips"] = std::move(clips);
  std::ofstream f(fs::path(options.out_dir) / "timings.json");
  f << j.dump(2) << '\n';

  std::printf("processed %zu clips with [%s] into %s\n", manifest.entries.size(),
              spec.stages_string().c_str(), options.out_dir.c_str());
  return 0;
}

int cmd_evaluate(const EvaluateCliOptions& options) {
  EvaluateOptions eval;
  if (!options.region.empty()) {
    eval.region_kind = scenario_kind_from_string(options.region);
  }
  eval.transcripts_ref_dir = options.transcripts_ref_dir;
  eval.transcripts_hyp_dir = options.transcripts_hyp_dir;
  eval.scores_path = options.scores_path;
  eval.timings_path = options.timings_path;
  if (eval.timings_path.empty()) {
    const fs::path candidate = fs::path(options.processed_dir) / "timings.json";
    if (fs::exists(candidate)) {
      eval.timings_path = candidate.string();
    }
  }

  const EvalReport report = evaluate_manifest(options.dataset_dir, options.processed_dir, eval);
  const std::string report_path = options.report_path.empty()
                                      ? (fs::path(options.processed_dir) / "report.json").string()
                                      : options.report_path;
  write_report(report, report_path);
  if (!options.quiet) {
    print_report(report, std::cout);
  }
  std::printf("report written to %s\n", report_path.c_str());
  return 0;
}

int cmd_train(const TrainCliOptions& options) {
  if (options.weights_out.empty()) {
    throw std::invalid_argument("train: --out is required");
  }
  const Manifest manifest = load_manifest(options.dataset_dir);

  std::vector<ScenarioBundle> train_set;
  std::vector<ScenarioBundle> val_set;
  for (const auto& entry : manifest.entries) {
    ScenarioBundle b = load_bundle(options.dataset_dir, entry);
    (entry.split == "validation" ? val_set : train_set).push_back(std::move(b));
  }
  if (train_set.empty()) {
    // Tiny datasets can end up all-validation; train on everything instead.
    train_set = std::move(val_set);
    val_set.clear();
  }

  StftConfig stft_cfg;
  stft_cfg.dft_size = 2 * (options.num_bins - 1);
  stft_cfg.frame_len = stft_cfg.dft_size;
  stft_cfg.hop = stft_cfg.dft_size / 2;

  ModelConfig model_cfg;
  model_cfg.num_bins = options.num_bins;
  model_cfg.hidden_dim = options.hidden_dim;
  model_cfg.num_gru_layers = options.num_layers;

  TrainConfig tc;
  tc.learning_rate = options.learning_rate;
  tc.batch_size = options.batch_size;
  tc.max_epochs = options.epochs;
  tc.seed = options.seed;
  tc.normalize_features = options.normalize_features;

  const TrainResult result = train(train_set, val_set, tc, model_cfg, stft_cfg);
  save_weights(result.best_weights, options.weights_out);

  if (!options.loss_curve_out.empty()) {
    json j;
    j["train_loss"] = result.train_loss;
    if (!result.val_loss.empty()) {
      j["val_loss"] = result.val_loss;
    }
    std::ofstream f(options.loss_curve_out, std::ios::trunc);
    f << j.dump(2) << '\n';
  }
  std::printf("trained %d epochs on %zu clips (%zu validation); weights in %s\n",
              options.epochs, train_set.size(), val_set.size(), options.weights_out.c_str());
  std::printf("loss %.6g -> %.6g\n", result.train_loss.front(), result.train_loss.back());
  return 0;
}

int cmd_score(const ScoreCliOptions& options) {
  const Manifest manifest = load_manifest(options.dataset_dir);
  const ScenarioKind kind = scenario_kind_from_string(options.kind);

  std::string endpoint = options.endpoint;
  if (endpoint.empty()) {
    const char* env = std::getenv("AEC_SCORE_ENDPOINT");
    endpoint = env == nullptr ? "" : env;
  }
  std::string api_key = options.api_key;
  if (api_key.empty()) {
    const char* env = std::getenv("AEC_SCORE_KEY");
    api_key = env == nullptr ? "" : env;
  }
  const std::string out_path = options.out_path.empty()
                                   ? (fs::path(options.processed_dir) / "scores.json").string()
                                   : options.out_path;

  std::vector<ClipScore> scores;
  if (options.offline || endpoint.empty()) {
    for (const auto& entry : manifest.entries) {
      ClipScore s;
      s.id = entry.id;
      s.unavailable = true;
      s.note = "offline";
      scores.push_back(std::move(s));
    }
  } else {
    ScoreClient client(endpoint, api_key);
    for (const auto& entry : manifest.entries) {
      const AudioClip far =
          read_wav((fs::path(options.dataset_dir) / entry.far_end_file).string());
      const AudioClip mic = read_wav((fs::path(options.dataset_dir) / entry.mic_file).string());
      const AudioClip processed = read_wav(
          (fs::path(options.processed_dir) / (entry.id + "_processed.wav")).string());
      try {
        scores.push_back(client.submit(entry.id, kind, far, mic, processed));
      } catch (const std::exception& e) {
        ClipScore s;
        s.id = entry.id;
        s.unavailable = true;
        s.note = e.what();
        scores.push_back(std::move(s));
      }
    }
  }

  // Merge into any existing scores file so fest/dt/nest runs accumulate.
  json j;
  if (fs::exists(out_path)) {
    std::ifstream f(out_path);
    j = json::parse(f);
  } else {
    j["aggregate"] = json::object();
    j["clips"] = json::array();
  }
  double echo_sum = 0.0, other_sum = 0.0, mos_sum = 0.0;
  int n_scored = 0;
  for (const auto& s : scores) {
    json js;
    js["id"] = s.id;
    js["kind"] = to_string(kind);
    if (s.unavailable) {
      js["unavailable"] = true;
      js["note"] = s.note;
    } else {
      if (s.echo_dmos) js["echo_dmos"] = *s.echo_dmos;
      if (s.other_dmos) js["other_dmos"] = *s.other_dmos;
      if (s.mos) js["mos"] = *s.mos;
      echo_sum += s.echo_dmos.value_or(0.0);
      other_sum += s.other_dmos.value_or(0.0);
      mos_sum += s.mos.value_or(0.0);
      ++n_scored;
    }
    j["clips"].push_back(std::move(js));
  }
  if (n_scored > 0) {
    switch (kind) {
      case ScenarioKind::fest:
        j["aggregate"]["fe_st_echo_dmos"] = echo_sum / n_scored;
        break;
      case ScenarioKind::dt:
        j["aggregate"]["dt_echo_dmos"] = echo_sum / n_scored;
        j["aggregate"]["dt_other_dmos"] = other_sum / n_scored;
        break;
      case ScenarioKind::nest:
        j["aggregate"]["ne_st_mos"] = mos_sum / n_scored;
        break;
    }
  }
  std::ofstream f(out_path, std::ios::trunc);
  f << j.dump(2) << '\n';
  std::printf("scored %d/%zu clips (%s), scores in %s\n", n_scored, scores.size(),
              to_string(kind).c_str(), out_path.c_str());
  return 0;
}

}  // namespace aec

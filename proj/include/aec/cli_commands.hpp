#pragma once

#include <cstdint>
#include <string>

#include "aec/audio.hpp"
#include "aec/report.hpp"
#include "aec/scenario.hpp"

namespace aec {

struct GenerateOptions {
  std::uint64_t seed = 1;
  int count = 10;
  std::string out_dir;
  int sample_rate_hz = 16000;
  int validation_count = 500;
  WavFormat format = WavFormat::float32;
  std::string config_path;  // sampler config JSON, optional
  std::string speech_dir;   // optional source pools; procedural when empty
  std::string noise_dir;
  int pool_speech = 24;
  int pool_noise = 6;
};

struct ProcessCliOptions {
  std::string dataset_dir;
  std::string out_dir;
  std::string pipeline_csv = "delay_align,nlms";
  std::string weights_path;
  bool normalize_features = false;
  // Freeze NLMS adaptation where the stored ground-truth near end is active.
  bool freeze_on_near_end = false;
};

struct EvaluateCliOptions {
  std::string dataset_dir;
  std::string processed_dir;
  std::string report_path;  // defaults to <processed_dir>/report.json
  std::string region;       // "", "fest", "dt", or "nest"
  std::string transcripts_ref_dir;
  std::string transcripts_hyp_dir;
  std::string scores_path;
  std::string timings_path;  // defaults to <processed_dir>/timings.json when present
  bool quiet = false;
};

struct TrainCliOptions {
  std::string dataset_dir;
  std::string weights_out;
  std::string loss_curve_out;  // optional JSON
  int epochs = 50;
  double learning_rate = 0.0003;
  int batch_size = 1;
  std::uint64_t seed = 0;
  int num_bins = 161;  // STFT frame/hop follow: dft = 2*(bins-1), hop = dft/2
  int hidden_dim = 322;
  int num_layers = 2;
  bool normalize_features = false;
};

struct ScoreCliOptions {
  std::string dataset_dir;
  std::string processed_dir;
  std::string endpoint;  // falls back to AEC_SCORE_ENDPOINT
  std::string api_key;   // falls back to AEC_SCORE_KEY
  std::string kind = "dt";
  std::string out_path;  // defaults to <processed_dir>/scores.json
  bool offline = false;
};

SamplerConfig load_sampler_config(const std::string& path);

int cmd_generate(const GenerateOptions& options);
int cmd_process(const ProcessCliOptions& options);
int cmd_evaluate(const EvaluateCliOptions& options);
int cmd_train(const TrainCliOptions& options);
int cmd_score(const ScoreCliOptions& options);

}  // namespace aec

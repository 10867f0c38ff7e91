#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "aec/cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic echo scenario generation, cancellation, and evaluation"};
  app.require_subcommand(1);

  aec::GenerateOptions gen;
  std::string gen_format = "float32";
  auto* generate = app.add_subcommand("generate", "Synthesize a scenario dataset");
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--count", gen.count, "Number of scenarios")->check(CLI::PositiveNumber);
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--rate", gen.sample_rate_hz, "Sample rate (16000 or 48000)");
  generate->add_option("--validation-count", gen.validation_count,
                       "Leading scenarios marked as the validation split");
  generate->add_option("--format", gen_format, "WAV sample format: float32|pcm16");
  generate->add_option("--config", gen.config_path, "Sampler config JSON");
  generate->add_option("--speech-dir", gen.speech_dir, "Directory of source speech WAVs");
  generate->add_option("--noise-dir", gen.noise_dir, "Directory of source noise WAVs");
  generate->add_option("--pool-speech", gen.pool_speech, "Procedural speech pool size");
  generate->add_option("--pool-noise", gen.pool_noise, "Procedural noise pool size");

  aec::ProcessCliOptions proc;
  auto* process = app.add_subcommand("process", "Run a cancellation pipeline over a dataset");
  process->add_option("--manifest", proc.dataset_dir, "Dataset directory (with manifest.json)")
      ->required();
  process->add_option("--out", proc.out_dir, "Output directory")->required();
  process->add_option("--pipeline", proc.pipeline_csv,
                      "Comma-separated stages: delay_align,nlms,neural");
  process->add_option("--weights", proc.weights_path, "Model weights (required for neural)");
  process->add_flag("--normalize-features", proc.normalize_features,
                    "Per-utterance feature normalization for the neural stage");
  process->add_flag("--freeze-on-near-end", proc.freeze_on_near_end,
                    "Freeze NLMS adaptation where the ground-truth near end is active");

  aec::EvaluateCliOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics over processed clips");
  evaluate->add_option("--manifest", eval.dataset_dir, "Dataset directory")->required();
  evaluate->add_option("--processed", eval.processed_dir, "Processed clip directory")->required();
  evaluate->add_option("--report", eval.report_path, "Report JSON path");
  evaluate->add_option("--region", eval.region,
                       "Region override: fest|dt|nest (default: ground-truth far-end-only)");
  evaluate->add_option("--transcripts", eval.transcripts_ref_dir, "Reference transcript dir");
  evaluate->add_option("--hypotheses", eval.transcripts_hyp_dir, "Hypothesis transcript dir");
  evaluate->add_option("--scores", eval.scores_path, "Scores JSON from the score subcommand");
  evaluate->add_option("--timings", eval.timings_path, "Timings JSON from the process step");
  evaluate->add_flag("--quiet", eval.quiet, "Suppress the console table");

  aec::TrainCliOptions tr;
  auto* train = app.add_subcommand("train", "Train the mask-estimation model on a dataset");
  train->add_option("--manifest", tr.dataset_dir, "Dataset directory")->required();
  train->add_option("--out", tr.weights_out, "Output weights file")->required();
  train->add_option("--loss-curve", tr.loss_curve_out, "Per-epoch loss JSON");
  train->add_option("--epochs", tr.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train->add_option("--lr", tr.learning_rate, "Adam learning rate");
  train->add_option("--batch", tr.batch_size, "Clips per update")->check(CLI::PositiveNumber);
  train->add_option("--seed", tr.seed, "Init/shuffle seed");
  train->add_option("--bins", tr.num_bins, "Mask bins (sets the STFT grid)");
  train->add_option("--hidden", tr.hidden_dim, "GRU hidden size");
  train->add_option("--layers", tr.num_layers, "GRU layer count");
  train->add_flag("--normalize-features", tr.normalize_features,
                  "Per-utterance feature normalization");

  aec::ScoreCliOptions score;
  auto* score_cmd = app.add_subcommand("score", "Submit clips to an external scoring service");
  score_cmd->add_option("--manifest", score.dataset_dir, "Dataset directory")->required();
  score_cmd->add_option("--processed", score.processed_dir, "Processed clip directory")
      ->required();
  score_cmd->add_option("--endpoint", score.endpoint,
                        "host:port (default: AEC_SCORE_ENDPOINT env var)");
  score_cmd->add_option("--api-key", score.api_key, "Bearer token (default: AEC_SCORE_KEY)");
  score_cmd->add_option("--kind", score.kind, "Scenario kind for this batch: fest|dt|nest");
  score_cmd->add_option("--out", score.out_path, "Scores JSON path");
  score_cmd->add_flag("--offline", score.offline, "Mark every clip unavailable without network");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      if (gen_format == "pcm16") {
        gen.format = aec::WavFormat::pcm16;
      } else if (gen_format != "float32") {
        throw std::invalid_argument("unknown --format: " + gen_format);
      }
      return aec::cmd_generate(gen);
    }
    if (*process) {
      return aec::cmd_process(proc);
    }
    if (*evaluate) {
      return aec::cmd_evaluate(eval);
    }
    if (*train) {
      return aec::cmd_train(tr);
    }
    if (*score_cmd) {
      return aec::cmd_score(score);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <vector>

#include "aec/model.hpp"
#include "aec/scenario.hpp"

namespace aec {

struct TrainConfig {
  double learning_rate = 0.0003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 1;
  int max_epochs = 50;
  double grad_clip_norm = 0.0;  // 0 disables clipping
  bool shuffle = true;
  bool normalize_features = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// Mean over all T x F entries of (enhanced - clean)^2.
double mse_loss(const Mat& enhanced_mag, const Mat& clean_mag);

// dLoss/dMask for enhanced = mask .* mic_mag: 2 (enhanced - clean) .* mic_mag / (T*F).
Mat loss_mask_gradient(const Mat& mask, const Mat& mic_mag, const Mat& clean_mag);

// Exact gradients of mse_loss w.r.t. every weight tensor, by
// backpropagation through time across all GRU layers and the FC head.
ModelWeights backprop(const Mat& features, const ModelWeights& w, const Mat& mic_mag,
                      const Mat& clean_mag, double* loss_out = nullptr);

class AdamState {
 public:
  explicit AdamState(const ModelConfig& cfg);
  void step(ModelWeights& w, ModelWeights& grads, const TrainConfig& cfg);
  long steps() const { return t_; }

 private:
  ModelWeights m_;
  ModelWeights v_;
  long t_ = 0;
};

struct TrainResult {
  ModelWeights best_weights;
  std::vector<double> train_loss;  // mean loss per epoch
  std::vector<double> val_loss;    // empty when no validation set
};

// Input features: mic + far end log power; target: the clean near-end
// speech magnitude on the mic's STFT grid. Whole clips are unrolled (no
// truncation); gradients are accumulated over batch_size clips per update.
// Deterministic for a fixed config, including across thread counts.
TrainResult train(const std::vector<ScenarioBundle>& train_set,
                  const std::vector<ScenarioBundle>& val_set, const TrainConfig& cfg,
                  const ModelConfig& model_cfg, const StftConfig& stft_cfg = {});

}  // namespace aec

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aec/kernels.hpp"
#include "aec/stft.hpp"

namespace aec {

// Mask-estimation network: a stack of GRU layers over concatenated log-power
// features of the microphone and far-end spectrograms, followed by a
// fully-connected sigmoid layer producing one suppression gain per bin.
struct ModelConfig {
  int num_bins = 161;
  int hidden_dim = 322;
  int num_gru_layers = 2;

  int input_dim() const { return 2 * num_bins; }
  std::int64_t param_count() const;
  bool operator==(const ModelConfig&) const = default;
};

struct GruLayerWeights {
  // Gate convention, fixed for weight-file portability:
  //   z = sigmoid(Wz x + Uz h + bz)
  //   r = sigmoid(Wr x + Ur h + br)
  //   c = tanh(Wh x + Uh (r .* h) + bh)
  //   h <- (1 - z) .* h + z .* c
  Mat w_update, w_reset, w_cand;  // hidden x input
  Mat u_update, u_reset, u_cand;  // hidden x hidden
  std::vector<double> b_update, b_reset, b_cand;
};

struct TensorView {
  std::string name;
  std::vector<int> shape;
  std::vector<double>* data;
};

struct ModelWeights {
  ModelConfig cfg;
  std::vector<GruLayerWeights> layers;
  Mat fc_w;  // num_bins x hidden
  std::vector<double> fc_b;

  static ModelWeights zeros(const ModelConfig& cfg);
  // Uniform +-1/sqrt(fan_in), quantized to the float32 grid used by the
  // weight file so a fresh model round-trips save/load bit-exactly.
  static ModelWeights random_init(const ModelConfig& cfg, std::uint64_t seed);

  std::vector<TensorView> tensor_views();
};

// Row t = [log_power(mic) row t ++ log_power(far) row t].
Mat assemble_features(const Spectrogram& mic_spec, const Spectrogram& far_spec,
                      double floor_eps = 1e-12);

// Optional per-utterance feature normalization (zero mean / unit variance
// per column). Off by default everywhere.
void normalize_features(Mat& features);

struct GruTrace {
  int num_frames = 0;
  // Per layer, per frame activations kept for backpropagation through time.
  std::vector<Mat> update_gate, reset_gate, candidate, hidden;  // each T x hidden
  Mat mask;                                                     // T x num_bins
};

GruTrace gru_forward_trace(const Mat& features, const ModelWeights& w);

struct GruForward {
  Mat mask;                 // entries strictly in (0, 1)
  std::vector<Mat> hidden;  // per layer, T x hidden
};

// Strictly causal: mask row t depends only on feature rows <= t.
GruForward gru_forward(const Mat& features, const ModelWeights& w);

// Output magnitude = mask .* |mic|; phase of the mic is kept.
Spectrogram apply_mask(const Spectrogram& mic_spec, const Mat& mask);

// stft -> features -> gru -> mask -> istft. Output length equals the input
// length (synthesis edges zero-padded).
AudioClip enhance(const AudioClip& mic, const AudioClip& far, const ModelWeights& w,
                  const StftConfig& cfg = {}, bool normalize = false);

// Weight container: "AECW" magic, format version, JSON tensor directory
// (names, shapes, byte offsets), then little-endian float32 payload.
void save_weights(const ModelWeights& w, const std::string& path);
ModelWeights load_weights(const std::string& path);
ModelWeights load_weights(const std::string& path, const ModelConfig& expected);

}  // namespace aec

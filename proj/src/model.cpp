#include "aec/model.hpp"

#include <cmath>
#include <stdexcept>

#include "aec/rng.hpp"

namespace aec {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(std::string("gru_forward: non-finite ") + what);
    }
  }
}

}  // namespace

std::int64_t ModelConfig::param_count() const {
  std::int64_t count = 0;
  int in_dim = input_dim();
  for (int l = 0; l < num_gru_layers; ++l) {
    count += 3LL * (static_cast<std::int64_t>(hidden_dim) * in_dim +
                    static_cast<std::int64_t>(hidden_dim) * hidden_dim + hidden_dim);
    in_dim = hidden_dim;
  }
  count += static_cast<std::int64_t>(num_bins) * hidden_dim + num_bins;
  return count;
}

ModelWeights ModelWeights::zeros(const ModelConfig& cfg) {
  ModelWeights w;
  w.cfg = cfg;
  int in_dim = cfg.input_dim();
  for (int l = 0; l < cfg.num_gru_layers; ++l) {
    GruLayerWeights layer;
    layer.w_update = Mat(cfg.hidden_dim, in_dim);
    layer.w_reset = Mat(cfg.hidden_dim, in_dim);
    layer.w_cand = Mat(cfg.hidden_dim, in_dim);
    layer.u_update = Mat(cfg.hidden_dim, cfg.hidden_dim);
    layer.u_reset = Mat(cfg.hidden_dim, cfg.hidden_dim);
    layer.u_cand = Mat(cfg.hidden_dim, cfg.hidden_dim);
    layer.b_update.assign(static_cast<std::size_t>(cfg.hidden_dim), 0.0);
    layer.b_reset.assign(static_cast<std::size_t>(cfg.hidden_dim), 0.0);
    layer.b_cand.assign(static_cast<std::size_t>(cfg.hidden_dim), 0.0);
    w.layers.push_back(std::move(layer));
    in_dim = cfg.hidden_dim;
  }
  w.fc_w = Mat(cfg.num_bins, cfg.hidden_dim);
  w.fc_b.assign(static_cast<std::size_t>(cfg.num_bins), 0.0);
  return w;
}

ModelWeights ModelWeights::random_init(const ModelConfig& cfg, std::uint64_t seed) {
  ModelWeights w = zeros(cfg);
  Rng rng(seed);
  for (TensorView& t : w.tensor_views()) {
    const double fan_in = t.shape.size() == 2 ? t.shape[1] : t.shape[0];
    const double bound = 1.0 / std::sqrt(fan_in);
    for (double& v : *t.data) {
      v = static_cast<double>(static_cast<float>(rng.uniform(-bound, bound)));
    }
  }
  return w;
}

std::vector<TensorView> ModelWeights::tensor_views() {
  std::vector<TensorView> views;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "gru" + std::to_string(l) + ".";
    GruLayerWeights& g = layers[l];
    views.push_back({p + "w_update", {g.w_update.rows, g.w_update.cols}, &g.w_update.a});
    views.push_back({p + "w_reset", {g.w_reset.rows, g.w_reset.cols}, &g.w_reset.a});
    views.push_back({p + "w_cand", {g.w_cand.rows, g.w_cand.cols}, &g.w_cand.a});
    views.push_back({p + "u_update", {g.u_update.rows, g.u_update.cols}, &g.u_update.a});
    views.push_back({p + "u_reset", {g.u_reset.rows, g.u_reset.cols}, &g.u_reset.a});
    views.push_back({p + "u_cand", {g.u_cand.rows, g.u_cand.cols}, &g.u_cand.a});
    views.push_back({p + "b_update", {static_cast<int>(g.b_update.size())}, &g.b_update});
    views.push_back({p + "b_reset", {static_cast<int>(g.b_reset.size())}, &g.b_reset});
    views.push_back({p + "b_cand", {static_cast<int>(g.b_cand.size())}, &g.b_cand});
  }
  views.push_back({"fc.weight", {fc_w.rows, fc_w.cols}, &fc_w.a});
  views.push_back({"fc.bias", {static_cast<int>(fc_b.size())}, &fc_b});
  return views;
}

Mat assemble_features(const Spectrogram& mic_spec, const Spectrogram& far_spec,
                      double floor_eps) {
  if (mic_spec.num_frames != far_spec.num_frames || mic_spec.num_bins != far_spec.num_bins) {
    throw std::invalid_argument("assemble_features: spectrogram shape mismatch");
  }
  const Mat mic_lp = log_power(mic_spec, floor_eps);
  const Mat far_lp = log_power(far_spec, floor_eps);
  const int bins = mic_spec.num_bins;
  Mat features(mic_spec.num_frames, 2 * bins);
  for (int t = 0; t < mic_spec.num_frames; ++t) {
    double* row = features.row(t);
    for (int f = 0; f < bins; ++f) {
      row[f] = mic_lp(t, f);
      row[bins + f] = far_lp(t, f);
    }
  }
  return features;
}

void normalize_features(Mat& features) {
  for (int c = 0; c < features.cols; ++c) {
    double mean = 0.0;
    for (int t = 0; t < features.rows; ++t) {
      mean += features(t, c);
    }
    mean /= features.rows;
    double var = 0.0;
    for (int t = 0; t < features.rows; ++t) {
      const double d = features(t, c) - mean;
      var += d * d;
    }
    var /= features.rows;
    const double inv = 1.0 / std::sqrt(var + 1e-8);
    for (int t = 0; t < features.rows; ++t) {
      features(t, c) = (features(t, c) - mean) * inv;
    }
  }
}

GruTrace gru_forward_trace(const Mat& features, const ModelWeights& w) {
  const ModelConfig& cfg = w.cfg;
  if (features.cols != cfg.input_dim()) {
    throw std::invalid_argument("gru_forward: feature width does not match config");
  }
  if (static_cast<int>(w.layers.size()) != cfg.num_gru_layers) {
    throw std::invalid_argument("gru_forward: layer count mismatch");
  }
  const int T = features.rows;
  const int H = cfg.hidden_dim;

  GruTrace trace;
  trace.num_frames = T;
  trace.update_gate.assign(w.layers.size(), Mat(T, H));
  trace.reset_gate.assign(w.layers.size(), Mat(T, H));
  trace.candidate.assign(w.layers.size(), Mat(T, H));
  trace.hidden.assign(w.layers.size(), Mat(T, H));
  trace.mask = Mat(T, cfg.num_bins);

  std::vector<double> az(static_cast<std::size_t>(H));
  std::vector<double> ar(static_cast<std::size_t>(H));
  std::vector<double> ah(static_cast<std::size_t>(H));
  std::vector<double> tmp(static_cast<std::size_t>(H));
  std::vector<double> rh(static_cast<std::size_t>(H));
  std::vector<double> fc(static_cast<std::size_t>(cfg.num_bins));
  const std::vector<double> h0(static_cast<std::size_t>(H), 0.0);

  for (int t = 0; t < T; ++t) {
    const double* x = features.row(t);
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
      const GruLayerWeights& g = w.layers[l];
      const double* h_prev = t > 0 ? trace.hidden[l].row(t - 1) : h0.data();

      kern::matvec(g.w_update, x, az.data());
      kern::matvec(g.u_update, h_prev, tmp.data());
      for (int i = 0; i < H; ++i) {
        az[static_cast<std::size_t>(i)] =
            sigmoid(az[static_cast<std::size_t>(i)] + tmp[static_cast<std::size_t>(i)] + g.b_update[static_cast<std::size_t>(i)]);
      }
      kern::matvec(g.w_reset, x, ar.data());
      kern::matvec(g.u_reset, h_prev, tmp.data());
      for (int i = 0; i < H; ++i) {
        ar[static_cast<std::size_t>(i)] =
            sigmoid(ar[static_cast<std::size_t>(i)] + tmp[static_cast<std::size_t>(i)] + g.b_reset[static_cast<std::size_t>(i)]);
      }
      for (int i = 0; i < H; ++i) {
        rh[static_cast<std::size_t>(i)] = ar[static_cast<std::size_t>(i)] * h_prev[i];
      }
      kern::matvec(g.w_cand, x, ah.data());
      kern::matvec(g.u_cand, rh.data(), tmp.data());
      for (int i = 0; i < H; ++i) {
        ah[static_cast<std::size_t>(i)] =
            std::tanh(ah[static_cast<std::size_t>(i)] + tmp[static_cast<std::size_t>(i)] + g.b_cand[static_cast<std::size_t>(i)]);
      }

      double* z_row = trace.update_gate[l].row(t);
      double* r_row = trace.reset_gate[l].row(t);
      double* c_row = trace.candidate[l].row(t);
      double* h_row = trace.hidden[l].row(t);
      for (int i = 0; i < H; ++i) {
        z_row[i] = az[static_cast<std::size_t>(i)];
        r_row[i] = ar[static_cast<std::size_t>(i)];
        c_row[i] = ah[static_cast<std::size_t>(i)];
        h_row[i] = (1.0 - z_row[i]) * h_prev[i] + z_row[i] * c_row[i];
      }
      x = h_row;
    }

    kern::matvec(w.fc_w, x, fc.data());
    double* mask_row = trace.mask.row(t);
    for (int f = 0; f < cfg.num_bins; ++f) {
      mask_row[f] = sigmoid(fc[static_cast<std::size_t>(f)] + w.fc_b[static_cast<std::size_t>(f)]);
    }
  }
  check_finite(trace.mask.a, "mask");
  return trace;
}

GruForward gru_forward(const Mat& features, const ModelWeights& w) {
  GruTrace trace = gru_forward_trace(features, w);
  GruForward out;
  out.mask = std::move(trace.mask);
  out.hidden = std::move(trace.hidden);
  return out;
}

Spectrogram apply_mask(const Spectrogram& mic_spec, const Mat& mask) {
  if (mask.rows != mic_spec.num_frames || mask.cols != mic_spec.num_bins) {
    throw std::invalid_argument("apply_mask: mask shape does not match spectrogram");
  }
  Spectrogram out = mic_spec;
  for (int t = 0; t < out.num_frames; ++t) {
    for (int f = 0; f < out.num_bins; ++f) {
      out.at(t, f) *= mask(t, f);
    }
  }
  return out;
}

AudioClip enhance(const AudioClip& mic, const AudioClip& far, const ModelWeights& w,
                  const StftConfig& cfg, bool normalize) {
  if (mic.sample_rate_hz != far.sample_rate_hz) {
    throw std::invalid_argument("enhance: rate mismatch");
  }
  const std::size_t len = std::min(mic.samples.size(), far.samples.size());
  AudioClip mic_cut = segment(mic, 0, len);
  AudioClip far_cut = segment(far, 0, len);

  const Spectrogram mic_spec = stft(mic_cut, cfg);
  const Spectrogram far_spec = stft(far_cut, cfg);
  Mat features = assemble_features(mic_spec, far_spec);
  if (normalize) {
    normalize_features(features);
  }
  const GruForward fwd = gru_forward(features, w);
  AudioClip out = istft(apply_mask(mic_spec, fwd.mask));
  out.samples.resize(mic.samples.size(), 0.0);
  return out;
}

}  // namespace aec

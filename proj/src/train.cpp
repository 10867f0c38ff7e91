#include "aec/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "aec/rng.hpp"

namespace aec {
namespace {

void axpy(std::vector<double>& y, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += x[i];
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  }
  if (batch_size < 1 || max_epochs < 1) {
    throw std::invalid_argument("TrainConfig: batch_size and max_epochs must be >= 1");
  }
}

double mse_loss(const Mat& enhanced_mag, const Mat& clean_mag) {
  if (enhanced_mag.rows != clean_mag.rows || enhanced_mag.cols != clean_mag.cols) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < enhanced_mag.a.size(); ++i) {
    const double d = enhanced_mag.a[i] - clean_mag.a[i];
    acc += d * d;
  }
  return acc / static_cast<double>(enhanced_mag.a.size());
}

Mat loss_mask_gradient(const Mat& mask, const Mat& mic_mag, const Mat& clean_mag) {
  if (mask.rows != mic_mag.rows || mask.cols != mic_mag.cols ||
      mask.rows != clean_mag.rows || mask.cols != clean_mag.cols) {
    throw std::invalid_argument("loss_mask_gradient: shape mismatch");
  }
  Mat g(mask.rows, mask.cols);
  const double scale = 2.0 / static_cast<double>(mask.a.size());
  for (std::size_t i = 0; i < mask.a.size(); ++i) {
    const double enhanced = mask.a[i] * mic_mag.a[i];
    g.a[i] = scale * (enhanced - clean_mag.a[i]) * mic_mag.a[i];
  }
  return g;
}

ModelWeights backprop(const Mat& features, const ModelWeights& w, const Mat& mic_mag,
                      const Mat& clean_mag, double* loss_out) {
  const ModelConfig& cfg = w.cfg;
  const int T = features.rows;
  const int H = cfg.hidden_dim;
  const int B = cfg.num_bins;
  if (T < 1) {
    throw std::invalid_argument("backprop: need at least one frame");
  }

  const GruTrace trace = gru_forward_trace(features, w);
  if (loss_out != nullptr) {
    Mat enhanced(T, B);
    for (std::size_t i = 0; i < enhanced.a.size(); ++i) {
      enhanced.a[i] = trace.mask.a[i] * mic_mag.a[i];
    }
    *loss_out = mse_loss(enhanced, clean_mag);
  }

  const Mat dmask = loss_mask_gradient(trace.mask, mic_mag, clean_mag);
  ModelWeights grads = ModelWeights::zeros(cfg);

  const int num_layers = cfg.num_gru_layers;
  // Gradient w.r.t. each layer's hidden state rows, accumulated from above.
  std::vector<Mat> dh_ext(static_cast<std::size_t>(num_layers), Mat(T, H));

  // FC head: mask = sigmoid(fc_w h_top + fc_b).
  std::vector<double> da_fc(static_cast<std::size_t>(B));
  const Mat& h_top = trace.hidden[static_cast<std::size_t>(num_layers - 1)];
  for (int t = 0; t < T; ++t) {
    const double* mask_row = trace.mask.row(t);
    const double* dmask_row = dmask.row(t);
    for (int f = 0; f < B; ++f) {
      da_fc[static_cast<std::size_t>(f)] = dmask_row[f] * mask_row[f] * (1.0 - mask_row[f]);
    }
    kern::outer_acc(grads.fc_w, da_fc.data(), h_top.row(t));
    for (int f = 0; f < B; ++f) {
      grads.fc_b[static_cast<std::size_t>(f)] += da_fc[static_cast<std::size_t>(f)];
    }
    std::vector<double> dh(static_cast<std::size_t>(H));
    kern::matvec_t(w.fc_w, da_fc.data(), dh.data());
    double* ext = dh_ext[static_cast<std::size_t>(num_layers - 1)].row(t);
    for (int i = 0; i < H; ++i) {
      ext[i] += dh[static_cast<std::size_t>(i)];
    }
  }

  const std::vector<double> h0(static_cast<std::size_t>(H), 0.0);
  std::vector<double> dh_carry(static_cast<std::size_t>(H));
  std::vector<double> dh_total(static_cast<std::size_t>(H));
  std::vector<double> da_z(static_cast<std::size_t>(H));
  std::vector<double> da_r(static_cast<std::size_t>(H));
  std::vector<double> da_h(static_cast<std::size_t>(H));
  std::vector<double> drh(static_cast<std::size_t>(H));
  std::vector<double> rh(static_cast<std::size_t>(H));
  std::vector<double> tmp(static_cast<std::size_t>(H));
  std::vector<double> dx(static_cast<std::size_t>(std::max(cfg.input_dim(), H)));

  for (int l = num_layers - 1; l >= 0; --l) {
    const GruLayerWeights& g = w.layers[static_cast<std::size_t>(l)];
    GruLayerWeights& gg = grads.layers[static_cast<std::size_t>(l)];
    const Mat& zs = trace.update_gate[static_cast<std::size_t>(l)];
    const Mat& rs = trace.reset_gate[static_cast<std::size_t>(l)];
    const Mat& cs = trace.candidate[static_cast<std::size_t>(l)];
    const Mat& hs = trace.hidden[static_cast<std::size_t>(l)];
    const int in_dim = l == 0 ? cfg.input_dim() : H;

    std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
    for (int t = T - 1; t >= 0; --t) {
      const double* z = zs.row(t);
      const double* r = rs.row(t);
      const double* c = cs.row(t);
      const double* h_prev = t > 0 ? hs.row(t - 1) : h0.data();
      const double* x = l == 0 ? features.row(t)
                               : trace.hidden[static_cast<std::size_t>(l - 1)].row(t);
      const double* ext = dh_ext[static_cast<std::size_t>(l)].row(t);

      for (int i = 0; i < H; ++i) {
        dh_total[static_cast<std::size_t>(i)] = ext[i] + dh_carry[static_cast<std::size_t>(i)];
      }

      // h = (1-z) h_prev + z c
      for (int i = 0; i < H; ++i) {
        const double dz = dh_total[static_cast<std::size_t>(i)] * (c[i] - h_prev[i]);
        da_z[static_cast<std::size_t>(i)] = dz * z[i] * (1.0 - z[i]);
        const double dc = dh_total[static_cast<std::size_t>(i)] * z[i];
        da_h[static_cast<std::size_t>(i)] = dc * (1.0 - c[i] * c[i]);
        dh_carry[static_cast<std::size_t>(i)] = dh_total[static_cast<std::size_t>(i)] * (1.0 - z[i]);
        rh[static_cast<std::size_t>(i)] = r[i] * h_prev[i];
      }

      // candidate path: c = tanh(Wh x + Uh (r h_prev) + bh)
      kern::matvec_t(g.u_cand, da_h.data(), drh.data());
      for (int i = 0; i < H; ++i) {
        const double dr = drh[static_cast<std::size_t>(i)] * h_prev[i];
        da_r[static_cast<std::size_t>(i)] = dr * r[i] * (1.0 - r[i]);
        dh_carry[static_cast<std::size_t>(i)] += drh[static_cast<std::size_t>(i)] * r[i];
      }

      kern::matvec_t(g.u_update, da_z.data(), tmp.data());
      axpy(dh_carry, tmp);
      kern::matvec_t(g.u_reset, da_r.data(), tmp.data());
      axpy(dh_carry, tmp);

      kern::outer_acc(gg.w_update, da_z.data(), x);
      kern::outer_acc(gg.w_reset, da_r.data(), x);
      kern::outer_acc(gg.w_cand, da_h.data(), x);
      kern::outer_acc(gg.u_update, da_z.data(), h_prev);
      kern::outer_acc(gg.u_reset, da_r.data(), h_prev);
      kern::outer_acc(gg.u_cand, da_h.data(), rh.data());
      for (int i = 0; i < H; ++i) {
        gg.b_update[static_cast<std::size_t>(i)] += da_z[static_cast<std::size_t>(i)];
        gg.b_reset[static_cast<std::size_t>(i)] += da_r[static_cast<std::size_t>(i)];
        gg.b_cand[static_cast<std::size_t>(i)] += da_h[static_cast<std::size_t>(i)];
      }

      if (l > 0) {
        double* lower = dh_ext[static_cast<std::size_t>(l - 1)].row(t);
        kern::matvec_t(g.w_update, da_z.data(), dx.data());
        for (int i = 0; i < in_dim; ++i) lower[i] += dx[static_cast<std::size_t>(i)];
        kern::matvec_t(g.w_reset, da_r.data(), dx.data());
        for (int i = 0; i < in_dim; ++i) lower[i] += dx[static_cast<std::size_t>(i)];
        kern::matvec_t(g.w_cand, da_h.data(), dx.data());
        for (int i = 0; i < in_dim; ++i) lower[i] += dx[static_cast<std::size_t>(i)];
      }
    }
  }

  for (TensorView& t : grads.tensor_views()) {
    for (double v : *t.data) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("backprop: non-finite gradient in " + t.name);
      }
    }
  }
  return grads;
}

AdamState::AdamState(const ModelConfig& cfg)
    : m_(ModelWeights::zeros(cfg)), v_(ModelWeights::zeros(cfg)) {}

void AdamState::step(ModelWeights& w, ModelWeights& grads, const TrainConfig& cfg) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  auto wv = w.tensor_views();
  auto gv = grads.tensor_views();
  auto mv = m_.tensor_views();
  auto vv = v_.tensor_views();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    std::vector<double>& wd = *wv[i].data;
    const std::vector<double>& gd = *gv[i].data;
    std::vector<double>& md = *mv[i].data;
    std::vector<double>& vd = *vv[i].data;
    for (std::size_t k = 0; k < wd.size(); ++k) {
      md[k] = cfg.beta1 * md[k] + (1.0 - cfg.beta1) * gd[k];
      vd[k] = cfg.beta2 * vd[k] + (1.0 - cfg.beta2) * gd[k] * gd[k];
      const double m_hat = md[k] / bc1;
      const double v_hat = vd[k] / bc2;
      wd[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  }
}

namespace {

struct Example {
  Mat features;
  Mat mic_mag;
  Mat clean_mag;
};

Example make_example(const ScenarioBundle& bundle, const StftConfig& stft_cfg, bool normalize) {
  const Spectrogram mic_spec = stft(bundle.mic, stft_cfg);
  const Spectrogram far_spec = stft(bundle.far_end, stft_cfg);
  const Spectrogram clean_spec = stft(bundle.near_end_speech, stft_cfg);
  Example ex;
  ex.features = assemble_features(mic_spec, far_spec);
  if (normalize) {
    normalize_features(ex.features);
  }
  ex.mic_mag = mic_spec.magnitude();
  ex.clean_mag = clean_spec.magnitude();
  return ex;
}

void add_grads(ModelWeights& acc, ModelWeights& delta) {
  auto av = acc.tensor_views();
  auto dv = delta.tensor_views();
  for (std::size_t i = 0; i < av.size(); ++i) {
    axpy(*av[i].data, *dv[i].data);
  }
}

void scale_grads(ModelWeights& g, double s) {
  for (TensorView& t : g.tensor_views()) {
    for (double& v : *t.data) {
      v *= s;
    }
  }
}

double grad_norm(ModelWeights& g) {
  double acc = 0.0;
  for (TensorView& t : g.tensor_views()) {
    for (double v : *t.data) {
      acc += v * v;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

TrainResult train(const std::vector<ScenarioBundle>& train_set,
                  const std::vector<ScenarioBundle>& val_set, const TrainConfig& cfg,
                  const ModelConfig& model_cfg, const StftConfig& stft_cfg) {
  cfg.validate();
  if (train_set.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  if (model_cfg.num_bins != stft_cfg.bins()) {
    throw std::invalid_argument("train: model bins do not match STFT config");
  }

  // Features are fixed per clip; compute once.
  std::vector<Example> examples(train_set.size());
  kern::parallel_for(static_cast<std::ptrdiff_t>(train_set.size()), [&](std::size_t i) {
    examples[i] = make_example(train_set[i], stft_cfg, cfg.normalize_features);
  });
  std::vector<Example> val_examples(val_set.size());
  kern::parallel_for(static_cast<std::ptrdiff_t>(val_set.size()), [&](std::size_t i) {
    val_examples[i] = make_example(val_set[i], stft_cfg, cfg.normalize_features);
  });

  ModelWeights weights = ModelWeights::random_init(model_cfg, cfg.seed);
  AdamState adam(model_cfg);
  Rng shuffle_rng(Rng::mix(cfg.seed, 0xd473));

  TrainResult result;
  result.best_weights = weights;
  double best_metric = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.index(i)]);
      }
    }
    double epoch_loss = 0.0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t batch = std::min(static_cast<std::size_t>(cfg.batch_size),
                                         order.size() - pos);
      // Per-clip gradients in parallel, combined in batch order so the
      // update is identical for any thread count.
      std::vector<ModelWeights> grads(batch);
      std::vector<double> losses(batch);
      kern::parallel_for(static_cast<std::ptrdiff_t>(batch), [&](std::size_t b) {
        const Example& ex = examples[order[pos + b]];
        grads[b] = backprop(ex.features, weights, ex.mic_mag, ex.clean_mag, &losses[b]);
      });
      ModelWeights total = std::move(grads[0]);
      for (std::size_t b = 1; b < batch; ++b) {
        add_grads(total, grads[b]);
      }
      scale_grads(total, 1.0 / static_cast<double>(batch));
      if (cfg.grad_clip_norm > 0.0) {
        const double norm = grad_norm(total);
        if (norm > cfg.grad_clip_norm) {
          scale_grads(total, cfg.grad_clip_norm / norm);
        }
      }
      adam.step(weights, total, cfg);
      for (std::size_t b = 0; b < batch; ++b) {
        epoch_loss += losses[b];
      }
      pos += batch;
    }
    epoch_loss /= static_cast<double>(examples.size());
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("train: loss diverged");
    }
    result.train_loss.push_back(epoch_loss);

    double metric = epoch_loss;
    if (!val_examples.empty()) {
      std::vector<double> vloss(val_examples.size());
      kern::parallel_for(static_cast<std::ptrdiff_t>(val_examples.size()), [&](std::size_t i) {
        const Example& ex = val_examples[i];
        const GruForward fwd = gru_forward(ex.features, weights);
        Mat enhanced(ex.mic_mag.rows, ex.mic_mag.cols);
        for (std::size_t k = 0; k < enhanced.a.size(); ++k) {
          enhanced.a[k] = fwd.mask.a[k] * ex.mic_mag.a[k];
        }
        vloss[i] = mse_loss(enhanced, ex.clean_mag);
      });
      double mean_val = 0.0;
      for (double v : vloss) {
        mean_val += v;
      }
      mean_val /= static_cast<double>(vloss.size());
      result.val_loss.push_back(mean_val);
      metric = mean_val;
    }
    if (metric < best_metric) {
      best_metric = metric;
      result.best_weights = weights;
    }
  }
  return result;
}

}  // namespace aec

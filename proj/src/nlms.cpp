#include "aec/nlms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aec {

void NlmsConfig::validate() const {
  if (num_taps < 1) {
    throw std::invalid_argument("NlmsConfig: num_taps must be >= 1");
  }
  if (!(step_size > 0.0 && step_size < 2.0)) {
    throw std::invalid_argument("NlmsConfig: step_size must be in (0, 2)");
  }
  if (!(regularization_eps > 0.0)) {
    throw std::invalid_argument("NlmsConfig: regularization_eps must be positive");
  }
}

AecState::AecState(const NlmsConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto taps = static_cast<std::size_t>(cfg_.num_taps);
  taps_.assign(taps, 0.0);
  history_.assign(2 * taps, 0.0);
  pos_ = taps;
  power_ = 0.0;
}

std::pair<double, double> AecState::step(double mic, double loopback, bool near_active) {
  if (!std::isfinite(mic) || !std::isfinite(loopback)) {
    throw std::invalid_argument("AecState::step: non-finite input");
  }
  const auto taps = static_cast<std::size_t>(cfg_.num_taps);
  pos_ = pos_ == 0 ? taps - 1 : pos_ - 1;
  const double leaving = history_[pos_];  // sample falling out of the window
  power_ += loopback * loopback - leaving * leaving;
  history_[pos_] = loopback;
  history_[pos_ + taps] = loopback;

  const double* x = history_.data() + pos_;
  double estimate = 0.0;
  for (std::size_t k = 0; k < taps; ++k) {
    estimate += taps_[k] * x[k];
  }
  const double residual = mic - estimate;

  const bool frozen = cfg_.freeze_on_near_end && near_active;
  if (!frozen) {
    const double denom = std::max(power_, 0.0) + cfg_.regularization_eps;
    const double g = cfg_.step_size * residual / denom;
    for (std::size_t k = 0; k < taps; ++k) {
      taps_[k] += g * x[k];
    }
  }
  // Complement of the rounded residual so the decomposition is exact.
  return {residual, mic - residual};
}

NlmsResult nlms_process(const AudioClip& mic, const AudioClip& loopback, const NlmsConfig& cfg,
                        std::span<const std::uint8_t> near_active) {
  if (mic.samples.size() != loopback.samples.size() ||
      mic.sample_rate_hz != loopback.sample_rate_hz) {
    throw std::invalid_argument("nlms_process: length or rate mismatch");
  }
  if (!near_active.empty() && near_active.size() != mic.samples.size()) {
    throw std::invalid_argument("nlms_process: near_active length mismatch");
  }
  AecState state(cfg);
  NlmsResult out;
  out.residual.sample_rate_hz = mic.sample_rate_hz;
  out.echo_estimate.sample_rate_hz = mic.sample_rate_hz;
  out.residual.samples.resize(mic.samples.size());
  out.echo_estimate.samples.resize(mic.samples.size());
  for (std::size_t n = 0; n < mic.samples.size(); ++n) {
    const bool active = !near_active.empty() && near_active[n] != 0;
    const auto [res, est] = state.step(mic.samples[n], loopback.samples[n], active);
    out.residual.samples[n] = res;
    out.echo_estimate.samples[n] = est;
  }
  out.final_taps = state.taps();
  return out;
}

}  // namespace aec

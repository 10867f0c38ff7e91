#include <doctest.h>

#include <cmath>
#include <vector>

#include "aec/fft.hpp"
#include "aec/scenario.hpp"
#include "aec/metrics.hpp"
#include "aec/nlms.hpp"
#include "aec/rng.hpp"

using aec::AudioClip;
using aec::NlmsConfig;

namespace {

AudioClip white_noise(std::size_t n, std::uint64_t seed, double amp = 0.3) {
  AudioClip c;
  c.sample_rate_hz = 16000;
  c.samples.resize(n);
  aec::Rng rng(seed);
  for (double& s : c.samples) {
    s = amp * rng.normal();
  }
  return c;
}

// mic = loopback convolved with a short FIR path.
AudioClip through_path(const AudioClip& loopback, const std::vector<double>& path) {
  const std::vector<double> full = aec::fft_convolve(loopback.samples, path);
  AudioClip mic;
  mic.sample_rate_hz = loopback.sample_rate_hz;
  mic.samples.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(loopback.samples.size()));
  return mic;
}

}  // namespace

TEST_CASE("silent loopback leaves the mic untouched and taps frozen") {
  const AudioClip mic = white_noise(8000, 1);
  AudioClip silent;
  silent.sample_rate_hz = 16000;
  silent.samples.assign(8000, 0.0);
  NlmsConfig cfg;
  cfg.num_taps = 64;
  const auto out = aec::nlms_process(mic, silent, cfg);
  CHECK(out.residual.samples == mic.samples);
  for (double t : out.final_taps) {
    CHECK(t == 0.0);
  }
}

TEST_CASE("nlms identifies a delayed attenuated path") {
  const AudioClip loopback = white_noise(160000, 2);
  std::vector<double> path(64, 0.0);
  path[10] = 0.8;
  const AudioClip mic = through_path(loopback, path);

  NlmsConfig cfg;
  cfg.num_taps = 64;
  const auto out = aec::nlms_process(mic, loopback, cfg);

  CHECK(out.final_taps[10] == doctest::Approx(0.8).epsilon(0.01));
  double off_path = 0.0;
  for (std::size_t k = 0; k < out.final_taps.size(); ++k) {
    if (k != 10) {
      off_path = std::max(off_path, std::abs(out.final_taps[k]));
    }
  }
  CHECK(off_path < 0.02);

  const auto erle = aec::erle_db(mic, out.residual, {{7.5, 10.0}});
  CHECK(erle.db >= 30.0);
}

TEST_CASE("exact decomposition: residual + echo estimate == mic") {
  const AudioClip loopback = white_noise(20000, 3);
  std::vector<double> path(32, 0.0);
  path[0] = 0.5;
  path[7] = -0.3;
  AudioClip mic = through_path(loopback, path);
  // Add a near end so the residual is nontrivial.
  const AudioClip near = white_noise(20000, 4, 0.1);
  for (std::size_t i = 0; i < mic.samples.size(); ++i) {
    mic.samples[i] += near.samples[i];
  }
  NlmsConfig cfg;
  cfg.num_taps = 64;
  const auto out = aec::nlms_process(mic, loopback, cfg);
  for (std::size_t i = 0; i < mic.samples.size(); ++i) {
    // The echo estimate is the exact complement of the residual...
    CHECK(out.echo_estimate.samples[i] == mic.samples[i] - out.residual.samples[i]);
    // ...and the sum reconstructs the mic to the last bit or two.
    const double sum = out.residual.samples[i] + out.echo_estimate.samples[i];
    const double scale = std::max({1.0, std::abs(out.residual.samples[i]),
                                   std::abs(out.echo_estimate.samples[i])});
    CHECK(std::abs(sum - mic.samples[i]) <= scale * 0x1.0p-50);
  }
}

TEST_CASE("power-of-two scaling leaves the tap trajectory invariant") {
  const AudioClip loopback = white_noise(30000, 5);
  std::vector<double> path(16, 0.0);
  path[3] = 0.6;
  const AudioClip mic = through_path(loopback, path);

  NlmsConfig cfg;
  cfg.num_taps = 32;
  cfg.regularization_eps = 1e-6;
  const auto base = aec::nlms_process(mic, loopback, cfg);

  const double g = 4.0;
  NlmsConfig scaled_cfg = cfg;
  scaled_cfg.regularization_eps = cfg.regularization_eps * g * g;
  const auto scaled = aec::nlms_process(aec::gain(mic, g), aec::gain(loopback, g), scaled_cfg);

  CHECK(scaled.final_taps == base.final_taps);
  for (std::size_t i = 0; i < mic.samples.size(); i += 617) {
    CHECK(scaled.residual.samples[i] == g * base.residual.samples[i]);
  }
}

TEST_CASE("taps stay finite over a million samples") {
  const AudioClip loopback = white_noise(1000000, 6);
  std::vector<double> path(8, 0.0);
  path[1] = 0.9;
  AudioClip mic = through_path(loopback, path);
  const AudioClip near = white_noise(1000000, 7, 0.2);
  for (std::size_t i = 0; i < mic.samples.size(); ++i) {
    mic.samples[i] += near.samples[i];
  }
  NlmsConfig cfg;
  cfg.num_taps = 64;
  cfg.step_size = 1.9;  // near the stability edge
  const auto out = aec::nlms_process(mic, loopback, cfg);
  for (double t : out.final_taps) {
    CHECK(std::isfinite(t));
    CHECK(std::abs(t) < 100.0);
  }
}

TEST_CASE("freeze_on_near_end leaves taps untouched in flagged regions") {
  const AudioClip loopback = white_noise(32000, 8);
  std::vector<double> path(16, 0.0);
  path[2] = 0.7;
  AudioClip mic = through_path(loopback, path);

  std::vector<std::uint8_t> active(32000, 0);
  for (std::size_t i = 16000; i < 32000; ++i) {
    active[i] = 1;
    mic.samples[i] += 0.4;  // crude near-end activity
  }

  NlmsConfig cfg;
  cfg.num_taps = 32;
  cfg.freeze_on_near_end = true;

  // Taps after the first (adapting) half...
  AudioClip mic_half = aec::segment(mic, 0, 16000);
  AudioClip loop_half = aec::segment(loopback, 0, 16000);
  const auto half = aec::nlms_process(mic_half, loop_half, cfg);
  // ...equal the taps after the full run with the frozen second half.
  const auto full = aec::nlms_process(mic, loopback, cfg, active);
  CHECK(full.final_taps == half.final_taps);
}

TEST_CASE("config validation") {
  NlmsConfig bad;
  bad.step_size = 2.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = NlmsConfig{};
  bad.num_taps = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("estimate_delay finds a pure delay to sub-sample accuracy") {
  const AudioClip loopback = white_noise(160000, 9);
  AudioClip mic = aec::delay_clip(loopback, 1600);  // 100 ms
  const auto est = aec::estimate_delay(mic, loopback, 500.0);
  REQUIRE(est.has_value());
  CHECK(std::abs(est->delay_ms - 100.0) < 0.1);
  CHECK(est->confidence > 0.5);
}

TEST_CASE("estimate_delay reports no echo for independent noise") {
  const AudioClip a = white_noise(160000, 10);
  const AudioClip b = white_noise(160000, 11);
  CHECK_FALSE(aec::estimate_delay(a, b, 500.0).has_value());
}

TEST_CASE("estimate_delay survives reverb and double talk") {
  const AudioClip loopback = white_noise(160000, 12);
  aec::RirSpec rir_spec;
  rir_spec.rt60_s = 0.25;
  rir_spec.length_s = 0.3;
  rir_spec.direct_delay_ms = 50.0;
  rir_spec.seed = 99;
  const AudioClip rir = aec::generate_rir(rir_spec, 16000);
  AudioClip mic = through_path(loopback, rir.samples);
  // Near end at roughly SER 0.
  const AudioClip near = white_noise(160000, 13);
  const auto [scaled_echo, _] = aec::mix_at_ser(near, mic, 0.0);
  mic = scaled_echo;
  for (std::size_t i = 0; i < mic.samples.size(); ++i) {
    mic.samples[i] += near.samples[i];
  }
  const auto est = aec::estimate_delay(mic, loopback, 500.0);
  REQUIRE(est.has_value());
  CHECK(std::abs(est->delay_ms - 50.0) < 2.0);
}

TEST_CASE("estimate_delay rejects short input") {
  const AudioClip a = white_noise(8000, 14);
  CHECK_THROWS_AS(aec::estimate_delay(a, a, 100.0), std::invalid_argument);
}

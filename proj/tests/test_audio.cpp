#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "aec/audio.hpp"
#include "aec/rng.hpp"

using aec::AudioClip;
using aec::WavFormat;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

AudioClip sine(double freq_hz, double duration_s, int rate, double amp = 0.5) {
  AudioClip c;
  c.sample_rate_hz = rate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate));
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate);
  }
  return c;
}

AudioClip random_clip(std::size_t n, int rate, std::uint64_t seed) {
  AudioClip c;
  c.sample_rate_hz = rate;
  c.samples.resize(n);
  aec::Rng rng(seed);
  for (double& s : c.samples) {
    s = rng.uniform(-1.0, 1.0);
  }
  return c;
}

// Least-squares fit of amplitude/phase at a known frequency.
double fit_sine_amplitude(const AudioClip& c, double freq_hz) {
  double sc = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    const double ph = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / c.sample_rate_hz;
    sc += c.samples[i] * std::cos(ph);
    ss += c.samples[i] * std::sin(ph);
  }
  const double n = static_cast<double>(c.samples.size());
  return 2.0 * std::sqrt(sc * sc + ss * ss) / n;
}

}  // namespace

TEST_CASE("pcm16 samples scale by 1/32768") {
  // Hand-built minimal WAV: [0, 16384, -16384].
  const std::string path = temp_path("aec_pcm16_scale.wav");
  AudioClip c;
  c.sample_rate_hz = 16000;
  c.samples = {0.0, 16384.0 / 32768.0, -16384.0 / 32768.0};
  aec::write_wav(c, path, WavFormat::pcm16);
  const AudioClip back = aec::read_wav(path);
  REQUIRE(back.samples.size() == 3);
  CHECK(back.samples[0] == 0.0);
  CHECK(back.samples[1] == doctest::Approx(0.5));
  CHECK(back.samples[2] == doctest::Approx(-0.5));
  CHECK(back.sample_rate_hz == 16000);
}

TEST_CASE("float32 round-trips bit-identically") {
  const std::string path = temp_path("aec_f32_roundtrip.wav");
  AudioClip c = random_clip(4096, 48000, 5);
  // Snap to the float32 grid first; the file stores float32.
  for (double& s : c.samples) {
    s = static_cast<double>(static_cast<float>(s));
  }
  aec::write_wav(c, path, WavFormat::float32);
  const AudioClip back = aec::read_wav(path);
  CHECK(back.sample_rate_hz == 48000);
  CHECK(back.samples == c.samples);
}

TEST_CASE("pcm16 clamps out-of-range samples") {
  const std::string path = temp_path("aec_pcm16_clamp.wav");
  AudioClip c;
  c.sample_rate_hz = 16000;
  c.samples = {2.0, -2.0};
  aec::write_wav(c, path, WavFormat::pcm16);
  const AudioClip back = aec::read_wav(path);
  CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(back.samples[1] == doctest::Approx(-1.0));
}

TEST_CASE("pcm16 round-trip stays within one quantization step") {
  const std::string path = temp_path("aec_pcm16_quant.wav");
  const AudioClip c = random_clip(10000, 16000, 9);
  aec::write_wav(c, path, WavFormat::pcm16);
  const AudioClip back = aec::read_wav(path);
  double max_err = 0.0;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    max_err = std::max(max_err, std::abs(c.samples[i] - back.samples[i]));
  }
  CHECK(max_err <= 1.0 / 32768.0);
}

TEST_CASE("duration follows the sample rate") {
  const AudioClip c = random_clip(48000, 48000, 2);
  CHECK(c.duration_s() == doctest::Approx(1.0));
}

TEST_CASE("malformed and degenerate files are rejected") {
  const std::string garbage = temp_path("aec_garbage.wav");
  {
    std::ofstream f(garbage, std::ios::binary);
    f << "this is not a riff file at all, padding padding";
  }
  CHECK_THROWS_WITH_AS(aec::read_wav(garbage), doctest::Contains("malformed RIFF"),
                       std::runtime_error);

  // Valid header claiming an unsupported codec (8-bit PCM).
  const std::string unsupported = temp_path("aec_unsupported.wav");
  {
    AudioClip c;
    c.samples = {0.1, 0.2};
    aec::write_wav(c, unsupported, WavFormat::pcm16);
    std::fstream f(unsupported, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(34);  // bits-per-sample field
    const std::uint16_t bits = 8;
    f.write(reinterpret_cast<const char*>(&bits), 2);
  }
  CHECK_THROWS_WITH_AS(aec::read_wav(unsupported), doctest::Contains("unsupported codec"),
                       std::runtime_error);

  const std::string empty = temp_path("aec_zero_len.wav");
  {
    AudioClip c;
    c.samples = {0.1};
    aec::write_wav(c, empty, WavFormat::pcm16);
    // Truncate the data chunk to zero length.
    std::fstream f(empty, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(40);
    const std::uint32_t len = 0;
    f.write(reinterpret_cast<const char*>(&len), 4);
  }
  CHECK_THROWS_WITH_AS(aec::read_wav(empty), doctest::Contains("zero-length"),
                       std::runtime_error);
}

TEST_CASE("multichannel input is downmixed by averaging") {
  // Stereo PCM16 file built by hand: L = 0.5, R = -0.25 per frame.
  const std::string path = temp_path("aec_stereo.wav");
  {
    std::ofstream f(path, std::ios::binary);
    auto u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
    f << "RIFF";
    u32(36 + 16);
    f << "WAVEfmt ";
    u32(16);
    u16(1);      // PCM
    u16(2);      // stereo
    u32(16000);  // rate
    u32(16000 * 4);
    u16(4);
    u16(16);
    f << "data";
    u32(16);
    for (int i = 0; i < 4; ++i) {
      u16(static_cast<std::uint16_t>(16384));                        // L = 0.5
      u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(-8192)));  // R = -0.25
    }
  }
  const AudioClip c = aec::read_wav(path);
  REQUIRE(c.samples.size() == 4);
  for (double s : c.samples) {
    CHECK(s == doctest::Approx(0.125));
  }
}

TEST_CASE("resample preserves a tone and the duration") {
  const AudioClip in = sine(1000.0, 1.0, 48000);
  const AudioClip out = aec::resample(in, 16000);
  CHECK(out.sample_rate_hz == 16000);
  CHECK(std::llabs(static_cast<long long>(out.samples.size()) - 16000) <= 1);

  // Trim filter edges before the fit.
  aec::AudioClip interior = aec::segment(out, 800, out.samples.size() - 1600);
  interior.sample_rate_hz = 16000;
  const double amp = fit_sine_amplitude(interior, 1000.0);
  CHECK(amp == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("resample identity and upsampling duration") {
  const AudioClip in = random_clip(16000, 16000, 3);
  const AudioClip same = aec::resample(in, 16000);
  CHECK(same.samples == in.samples);

  const AudioClip ten_s = random_clip(160000, 16000, 4);
  const AudioClip up = aec::resample(ten_s, 48000);
  CHECK(std::llabs(static_cast<long long>(up.samples.size()) - 480000) <= 1);

  AudioClip odd = random_clip(100, 44100, 5);
  CHECK_THROWS_AS(aec::resample(odd, 16000), std::invalid_argument);
}

TEST_CASE("rms basics") {
  AudioClip half;
  half.sample_rate_hz = 16000;
  half.samples.assign(16000, 0.5);
  CHECK(aec::rms(half) == doctest::Approx(0.5));

  AudioClip square;
  square.sample_rate_hz = 16000;
  square.samples.resize(16000);
  for (std::size_t i = 0; i < square.samples.size(); ++i) {
    square.samples[i] = i % 2 == 0 ? 1.0 : -1.0;
  }
  CHECK(aec::rms(square) == doctest::Approx(1.0));

  // Scaling a clip scales rms exactly (power-of-two gain).
  const AudioClip r = random_clip(5000, 16000, 8);
  CHECK(aec::rms(aec::gain(r, 4.0)) == 4.0 * aec::rms(r));
}

TEST_CASE("active_rms ignores silence") {
  AudioClip c;
  c.sample_rate_hz = 16000;
  c.samples.assign(32000, 0.0);
  for (std::size_t i = 16000; i < 32000; ++i) {
    c.samples[i] = 0.5;
  }
  const auto r = aec::active_rms(c, 40.0);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(0.5));

  AudioClip silent;
  silent.sample_rate_hz = 16000;
  silent.samples.assign(16000, 0.0);
  CHECK_FALSE(aec::active_rms(silent).has_value());
}

#include "aec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aec/fft.hpp"
#include "aec/rng.hpp"

namespace aec {
namespace {

// Selection threshold for source excerpts, dBFS of active RMS.
constexpr double kMinActiveDbfs = -45.0;
constexpr int kMaxExcerptRetries = 10;

bool excerpt_is_active(const AudioClip& clip) {
  const auto r = active_rms(clip);
  return r && 20.0 * std::log10(*r) > kMinActiveDbfs;
}

AudioClip pick_excerpt(const AudioClip& source, std::size_t len, Rng& rng, const char* what) {
  if (source.samples.size() < len) {
    throw std::invalid_argument(std::string("synthesize_scenario: ") + what + " source too short");
  }
  const std::size_t span = source.samples.size() - len;
  AudioClip excerpt;
  for (int attempt = 0; attempt < kMaxExcerptRetries; ++attempt) {
    const std::size_t start = span == 0 ? 0 : rng.index(span + 1);
    excerpt = segment(source, start, len);
    if (excerpt_is_active(excerpt)) {
      return excerpt;
    }
  }
  throw std::runtime_error(std::string("synthesize_scenario: no active ") + what +
                           " excerpt after retries");
}

}  // namespace

AudioClip ScenarioBundle::noise() const {
  AudioClip n = mic;
  for (std::size_t i = 0; i < n.samples.size(); ++i) {
    n.samples[i] -= echo.samples[i] + near_end_speech.samples[i];
  }
  return n;
}

AudioClip apply_nonlinearity(const AudioClip& x, const NonlinearitySpec& nl) {
  switch (nl.kind) {
    case NonlinearitySpec::Kind::none:
      return x;
    case NonlinearitySpec::Kind::hard_clip: {
      if (!(nl.clip_level > 0.0 && nl.clip_level <= 1.0)) {
        throw std::invalid_argument("apply_nonlinearity: clip_level outside (0, 1]");
      }
      AudioClip y = x;
      for (double& s : y.samples) {
        s = std::clamp(s, -nl.clip_level, nl.clip_level);
      }
      return y;
    }
    case NonlinearitySpec::Kind::sigmoid: {
      if (!(nl.sigmoid_slope > 0.0)) {
        throw std::invalid_argument("apply_nonlinearity: sigmoid_slope must be positive");
      }
      AudioClip y = x;
      for (double& s : y.samples) {
        s = 2.0 / (1.0 + std::exp(-nl.sigmoid_slope * s)) - 1.0;
      }
      // Gain-match at RMS so saturation changes shape, not level.
      const double in_rms = rms(x);
      const double out_rms = rms(y);
      if (in_rms > 0.0 && out_rms > 0.0) {
        const double g = in_rms / out_rms;
        for (double& s : y.samples) {
          s *= g;
        }
      }
      return y;
    }
  }
  throw std::logic_error("apply_nonlinearity: bad kind");
}

std::pair<AudioClip, double> mix_at_ser(const AudioClip& near_speech, const AudioClip& echo,
                                        double ser_db) {
  const auto near_rms = active_rms(near_speech);
  if (!near_rms) {
    throw std::runtime_error("mix_at_ser: silent near-end speech");
  }
  const auto echo_rms = active_rms(echo);
  if (!echo_rms) {
    throw std::runtime_error("mix_at_ser: silent echo");
  }
  const double scale = *near_rms / *echo_rms * db_to_amp_ratio(-ser_db);
  AudioClip scaled = gain(echo, scale);
  const auto scaled_rms = active_rms(scaled);
  const double achieved = 20.0 * std::log10(*near_rms / *scaled_rms);
  return {std::move(scaled), achieved};
}

AudioClip noise_at_snr(const AudioClip& signal, const AudioClip& noise, double snr_db) {
  if (std::isinf(snr_db)) {
    AudioClip silence = noise;
    silence.samples.assign(silence.samples.size(), 0.0);
    return silence;
  }
  const auto sig_rms = active_rms(signal);
  if (!sig_rms) {
    throw std::runtime_error("noise_at_snr: silent signal");
  }
  const double noise_rms = rms(noise);
  if (noise_rms <= 0.0) {
    return noise;  // already silent: nothing to scale
  }
  const double scale = *sig_rms / noise_rms * db_to_amp_ratio(-snr_db);
  return gain(noise, scale);
}

AudioClip mix_at_snr(const AudioClip& signal, const AudioClip& noise, double snr_db) {
  return mix(signal, noise_at_snr(signal, noise, snr_db));
}

ScenarioSpec sample_scenario_spec(const SamplerConfig& cfg, std::uint64_t master_seed,
                                  std::uint64_t index) {
  Rng rng = Rng::child(master_seed, index);
  ScenarioSpec spec;
  spec.seed = rng.bits();
  spec.ser_db = rng.uniform(cfg.ser_db_range.first, cfg.ser_db_range.second);
  spec.snr_db = cfg.add_noise ? rng.uniform(cfg.snr_db_range.first, cfg.snr_db_range.second)
                              : std::numeric_limits<double>::infinity();
  if (rng.bernoulli(cfg.p_nonlinear)) {
    if (rng.bernoulli(cfg.p_sigmoid_given_nonlinear)) {
      spec.nonlinearity.kind = NonlinearitySpec::Kind::sigmoid;
      spec.nonlinearity.sigmoid_slope =
          rng.uniform(cfg.sigmoid_slope_range.first, cfg.sigmoid_slope_range.second);
    } else {
      spec.nonlinearity.kind = NonlinearitySpec::Kind::hard_clip;
      spec.nonlinearity.clip_level =
          rng.uniform(cfg.clip_level_range.first, cfg.clip_level_range.second);
    }
  }
  spec.use_noisy_speech = rng.bernoulli(cfg.p_noisy_speech);
  spec.near_end_speech_s =
      rng.uniform(cfg.near_speech_s_range.first, cfg.near_speech_s_range.second);
  spec.clip_len_s = cfg.clip_len_s;
  spec.rir.rt60_s = rng.uniform(cfg.rt60_s_range.first, cfg.rt60_s_range.second);
  spec.rir.length_s = spec.rir.rt60_s;
  spec.rir.direct_delay_ms =
      rng.uniform(cfg.direct_delay_ms_range.first, cfg.direct_delay_ms_range.second);
  spec.rir.seed = rng.bits();
  spec.extra_delay_ms =
      rng.uniform(cfg.extra_delay_ms_range.first, cfg.extra_delay_ms_range.second);
  return spec;
}

ScenarioBundle synthesize_scenario(const ScenarioSpec& spec, const AudioClip& far_source,
                                   const AudioClip& near_source, const AudioClip& noise_source) {
  if (far_source.sample_rate_hz != near_source.sample_rate_hz ||
      far_source.sample_rate_hz != noise_source.sample_rate_hz) {
    throw std::invalid_argument("synthesize_scenario: source rate mismatch");
  }
  const int rate = far_source.sample_rate_hz;
  const auto clip_len = static_cast<std::size_t>(std::llround(spec.clip_len_s * rate));
  const auto near_len = static_cast<std::size_t>(std::llround(spec.near_end_speech_s * rate));
  if (near_len > clip_len) {
    throw std::invalid_argument("synthesize_scenario: near-end speech longer than clip");
  }

  Rng rng(spec.seed);

  AudioClip far_end = pick_excerpt(far_source, clip_len, rng, "far-end");
  if (spec.use_noisy_speech) {
    // Emulates drawing the far end from a noisy corpus: corrupt the clean
    // excerpt at a random source SNR.
    if (noise_source.samples.size() < clip_len) {
      throw std::invalid_argument("synthesize_scenario: noise source too short");
    }
    const double source_snr_db = rng.uniform(0.0, 40.0);
    const std::size_t span = noise_source.samples.size() - clip_len;
    const std::size_t start = span == 0 ? 0 : rng.index(span + 1);
    far_end = mix_at_snr(far_end, segment(noise_source, start, clip_len), source_snr_db);
  }

  // Echo path: loudspeaker distortion, then the room, then transport delay.
  AudioClip distorted = apply_nonlinearity(far_end, spec.nonlinearity);
  const AudioClip rir = generate_rir(spec.rir, rate);
  std::vector<double> conv = fft_convolve(distorted.samples, rir.samples);
  conv.resize(clip_len);
  AudioClip echo{std::move(conv), rate};
  const auto extra = static_cast<std::size_t>(std::llround(spec.extra_delay_ms / 1000.0 * rate));
  if (extra > 0) {
    echo = delay_clip(echo, extra);
  }

  // Near end: a 3-7 s excerpt zero-padded into the clip.
  AudioClip near_excerpt = pick_excerpt(near_source, near_len, rng, "near-end");
  const std::size_t near_span = clip_len - near_len;
  std::size_t near_start = near_span == 0 ? 0 : rng.index(near_span + 1);
  if (spec.near_start_s) {
    near_start = std::min(static_cast<std::size_t>(std::llround(*spec.near_start_s * rate)), near_span);
  }
  AudioClip near_speech;
  near_speech.sample_rate_hz = rate;
  near_speech.samples.assign(clip_len, 0.0);
  std::copy(near_excerpt.samples.begin(), near_excerpt.samples.end(),
            near_speech.samples.begin() + static_cast<std::ptrdiff_t>(near_start));

  auto [scaled_echo, achieved_ser] = mix_at_ser(near_speech, echo, spec.ser_db);
  (void)achieved_ser;

  AudioClip noise_scaled;
  if (std::isfinite(spec.snr_db)) {
    const std::size_t span = noise_source.samples.size() >= clip_len
                                 ? noise_source.samples.size() - clip_len
                                 : 0;
    if (noise_source.samples.size() < clip_len) {
      throw std::invalid_argument("synthesize_scenario: noise source too short");
    }
    const std::size_t start = span == 0 ? 0 : rng.index(span + 1);
    noise_scaled = noise_at_snr(near_speech, segment(noise_source, start, clip_len), spec.snr_db);
  } else {
    noise_scaled.sample_rate_hz = rate;
    noise_scaled.samples.assign(clip_len, 0.0);
  }

  AudioClip mic = scaled_echo;
  for (std::size_t i = 0; i < clip_len; ++i) {
    mic.samples[i] += near_speech.samples[i] + noise_scaled.samples[i];
  }

  ScenarioBundle bundle;
  bundle.far_end = std::move(far_end);
  bundle.echo = std::move(scaled_echo);
  bundle.near_end_speech = std::move(near_speech);
  bundle.mic = std::move(mic);
  bundle.spec = spec;
  bundle.spec.near_start_s = static_cast<double>(near_start) / rate;

  if (!bundle.spec.perturbations.empty()) {
    bundle = apply_perturbations(bundle);
  }
  return bundle;
}

ScenarioBundle apply_perturbations(const ScenarioBundle& bundle) {
  const auto& events = bundle.spec.perturbations;
  if (events.empty()) {
    return bundle;
  }
  const double clip_len_s = bundle.mic.duration_s();
  const int rate = bundle.mic.sample_rate_hz;
  const std::size_t n = bundle.mic.samples.size();

  int delay_jumps = 0;
  int gain_events = 0;
  for (const auto& e : events) {
    if (e.at_s < 0.0 || e.at_s > clip_len_s) {
      throw std::invalid_argument("apply_perturbations: event time outside clip");
    }
    if (e.kind == PerturbationSpec::Kind::glitch &&
        e.at_s + e.duration_s > clip_len_s + 1e-9) {
      throw std::invalid_argument("apply_perturbations: glitch extends past clip");
    }
    delay_jumps += e.kind == PerturbationSpec::Kind::delay_jump;
    gain_events += e.kind == PerturbationSpec::Kind::gain_variation;
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (events[i].kind == PerturbationSpec::Kind::delay_jump &&
          events[j].kind == PerturbationSpec::Kind::delay_jump &&
          events[i].at_s == events[j].at_s) {
        throw std::invalid_argument("apply_perturbations: conflicting delay jumps at one time");
      }
    }
  }
  if (gain_events > 1) {
    throw std::invalid_argument("apply_perturbations: multiple gain envelopes");
  }

  AudioClip far = bundle.far_end;
  AudioClip echo = bundle.echo;
  AudioClip near = bundle.near_end_speech;
  AudioClip noise = bundle.noise();

  for (const auto& e : events) {
    switch (e.kind) {
      case PerturbationSpec::Kind::delay_jump: {
        const auto n0 = static_cast<std::size_t>(std::llround(e.at_s * rate));
        const auto d = static_cast<std::size_t>(std::llround(e.delay_delta_ms / 1000.0 * rate));
        AudioClip shifted = echo;
        for (std::size_t i = n0; i < n; ++i) {
          shifted.samples[i] = i >= d ? echo.samples[i - d] : 0.0;
        }
        echo = std::move(shifted);
        break;
      }
      case PerturbationSpec::Kind::gain_variation: {
        if (e.envelope.empty()) {
          throw std::invalid_argument("apply_perturbations: empty gain envelope");
        }
        auto env = e.envelope;
        std::sort(env.begin(), env.end());
        for (std::size_t i = 0; i < n; ++i) {
          const double t = static_cast<double>(i) / rate;
          double g;
          if (t <= env.front().first) {
            g = env.front().second;
          } else if (t >= env.back().first) {
            g = env.back().second;
          } else {
            std::size_t k = 0;
            while (env[k + 1].first < t) {
              ++k;
            }
            const double u = (t - env[k].first) / (env[k + 1].first - env[k].first);
            g = env[k].second + u * (env[k + 1].second - env[k].second);
          }
          far.samples[i] *= g;
        }
        break;
      }
      case PerturbationSpec::Kind::glitch: {
        const auto lo = static_cast<std::size_t>(std::llround(e.at_s * rate));
        const auto hi = std::min(n, static_cast<std::size_t>(std::llround((e.at_s + e.duration_s) * rate)));
        for (std::size_t i = lo; i < hi; ++i) {
          echo.samples[i] = 0.0;
          near.samples[i] = 0.0;
          noise.samples[i] = 0.0;
        }
        break;
      }
    }
  }

  ScenarioBundle out;
  out.mic = echo;
  for (std::size_t i = 0; i < n; ++i) {
    out.mic.samples[i] = echo.samples[i] + near.samples[i] + noise.samples[i];
  }
  out.far_end = std::move(far);
  out.echo = std::move(echo);
  out.near_end_speech = std::move(near);
  out.spec = bundle.spec;
  return out;
}

AudioClip build_fest_clip(const AudioClip& far_end) {
  if (far_end.samples.empty()) {
    throw std::invalid_argument("build_fest_clip: empty far end");
  }
  AudioClip out = far_end;
  out.samples.insert(out.samples.end(), far_end.samples.begin(), far_end.samples.end());
  return out;
}

AudioClip build_dt_clip(const AudioClip& far_end, double gap_s) {
  if (far_end.samples.empty()) {
    throw std::invalid_argument("build_dt_clip: empty far end");
  }
  if (gap_s < 0.0) {
    throw std::invalid_argument("build_dt_clip: negative gap");
  }
  const auto gap = static_cast<std::size_t>(std::llround(gap_s * far_end.sample_rate_hz));
  AudioClip out = far_end;
  out.samples.insert(out.samples.end(), gap, 0.0);
  out.samples.insert(out.samples.end(), far_end.samples.begin(), far_end.samples.end());
  return out;
}

}  // namespace aec

#include "aec/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aec {
namespace {

double mean_square(const AudioClip& clip, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    acc += clip.samples[i] * clip.samples[i];
  }
  return acc / static_cast<double>(hi - lo);
}

}  // namespace

ErleResult erle_db(const AudioClip& mic, const AudioClip& residual,
                   std::optional<std::pair<double, double>> region_s) {
  if (mic.samples.size() != residual.samples.size() ||
      mic.sample_rate_hz != residual.sample_rate_hz) {
    throw std::invalid_argument("erle_db: length or rate mismatch");
  }
  std::size_t lo = 0;
  std::size_t hi = mic.samples.size();
  if (region_s) {
    if (region_s->first < 0.0 || region_s->second <= region_s->first) {
      throw std::invalid_argument("erle_db: bad region");
    }
    lo = static_cast<std::size_t>(std::llround(region_s->first * mic.sample_rate_hz));
    hi = static_cast<std::size_t>(std::llround(region_s->second * mic.sample_rate_hz));
    hi = std::min(hi, mic.samples.size());
    if (lo >= hi) {
      throw std::invalid_argument("erle_db: region exceeds clip");
    }
  }
  const double mic_ms = mean_square(mic, lo, hi);
  const double res_ms = mean_square(residual, lo, hi);
  if (mic_ms <= 0.0) {
    throw std::invalid_argument("erle_db: silent microphone signal");
  }
  if (res_ms <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {10.0 * std::log10(mic_ms / res_ms), false};
}

Transcript tokenize(const std::string& text) {
  Transcript t;
  std::string word;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'') {
      word.push_back(static_cast<char>(std::tolower(u)));
    } else if (!word.empty()) {
      t.words.push_back(word);
      word.clear();
    }
  }
  if (!word.empty()) {
    t.words.push_back(word);
  }
  return t;
}

Transcript load_transcript(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("load_transcript: cannot open " + path);
  }
  std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return tokenize(all);
}

double wacc(const Transcript& reference, const Transcript& hypothesis) {
  const std::size_t n = reference.words.size();
  const std::size_t m = hypothesis.words.size();
  if (n == 0) {
    throw std::invalid_argument("wacc: empty reference");
  }
  // Levenshtein distance, uniform costs, two-row dynamic program.
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (reference.words[i - 1] == hypothesis.words[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  const double wer = static_cast<double>(prev[m]) / static_cast<double>(n);
  return 1.0 - wer;
}

double challenge_metric(const ChallengeScores& s) {
  auto check_mos = [](double v, const char* name) {
    if (!(v >= 1.0 && v <= 5.0)) {
      throw std::invalid_argument(std::string("challenge_metric: ") + name + " out of [1, 5]");
    }
  };
  check_mos(s.fe_st_echo_dmos, "fe_st_echo_dmos");
  check_mos(s.ne_st_mos, "ne_st_mos");
  check_mos(s.dt_echo_dmos, "dt_echo_dmos");
  check_mos(s.dt_other_dmos, "dt_other_dmos");
  if (!(s.wacc >= 0.0 && s.wacc <= 1.0)) {
    throw std::invalid_argument("challenge_metric: wacc out of [0, 1]");
  }
  return ((s.fe_st_echo_dmos - 1.0) / 4.0 + (s.ne_st_mos - 1.0) / 4.0 +
          (s.dt_echo_dmos - 1.0) / 4.0 + (s.dt_other_dmos - 1.0) / 4.0 + s.wacc) /
         5.0;
}

Rt60Estimate estimate_rt60(const AudioClip& rir) {
  const std::size_t n = rir.samples.size();
  if (n < 2) {
    return {0.0, false};
  }
  // Backward-integrated energy.
  std::vector<double> tail_energy(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += rir.samples[i] * rir.samples[i];
    tail_energy[i] = acc;
  }
  const double total = tail_energy[0];
  if (total <= 0.0) {
    return {0.0, false};
  }

  auto first_below = [&](double db) -> std::ptrdiff_t {
    const double level = total * db_to_power_ratio(db);
    for (std::size_t i = 0; i < n; ++i) {
      if (tail_energy[i] <= level) {
        return static_cast<std::ptrdiff_t>(i);
      }
    }
    return -1;
  };
  const std::ptrdiff_t t5 = first_below(-5.0);
  const std::ptrdiff_t t25 = first_below(-25.0);
  if (t5 < 0 || t25 < 0 || t25 - t5 < 8) {
    return {0.0, false};
  }

  // Least-squares line through the decay curve on [t5, t25].
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(t25 - t5 + 1);
  for (std::ptrdiff_t i = t5; i <= t25; ++i) {
    if (tail_energy[static_cast<std::size_t>(i)] <= 0.0) {
      return {0.0, false};
    }
    const double xi = static_cast<double>(i);
    const double yi = 10.0 * std::log10(tail_energy[static_cast<std::size_t>(i)] / total);
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) {
    return {0.0, false};
  }
  const double slope = (count * sxy - sx * sy) / denom;  // dB per sample
  if (slope >= 0.0) {
    return {0.0, false};
  }
  // Residual check: a clean exponential decay fits to a fraction of a dB.
  const double intercept = (sy - slope * sx) / count;
  double resid = 0.0;
  for (std::ptrdiff_t i = t5; i <= t25; ++i) {
    const double yi = 10.0 * std::log10(tail_energy[static_cast<std::size_t>(i)] / total);
    const double e = yi - (intercept + slope * static_cast<double>(i));
    resid += e * e;
  }
  const bool reliable = std::sqrt(resid / count) < 3.0;
  const double rt60 = -60.0 / slope / rir.sample_rate_hz;
  return {rt60, reliable};
}

double pcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pcc: length mismatch");
  }
  const std::size_t n = x.size();
  if (n < 3) {
    throw std::invalid_argument("pcc: need at least 3 points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw std::invalid_argument("pcc: constant input vector");
  }
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) {
      ++j;
    }
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = avg;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double srcc(std::span<const double> x, std::span<const double> y) {
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pcc(rx, ry);
}

std::pair<double, double> eval_region(double clip_len_s, ScenarioKind kind) {
  if (clip_len_s <= 0.0) {
    throw std::invalid_argument("eval_region: non-positive length");
  }
  switch (kind) {
    case ScenarioKind::fest:
      return {clip_len_s / 2.0, clip_len_s};
    case ScenarioKind::dt:
      return {2.0 * clip_len_s / 3.0, clip_len_s};
    case ScenarioKind::nest:
      return {0.0, clip_len_s};
  }
  throw std::logic_error("eval_region: bad kind");
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "fest") return ScenarioKind::fest;
  if (s == "dt") return ScenarioKind::dt;
  if (s == "nest") return ScenarioKind::nest;
  throw std::invalid_argument("unknown scenario kind: " + s);
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::fest: return "fest";
    case ScenarioKind::dt: return "dt";
    case ScenarioKind::nest: return "nest";
  }
  return "?";
}

}  // namespace aec

// Times the OpenMP kernels against their serial references at the shapes the
// pipeline actually uses, plus the composite operations built on them.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "aec/kernels.hpp"
#include "aec/model.hpp"
#include "aec/nlms.hpp"
#include "aec/rng.hpp"
#include "aec/stft.hpp"

namespace {

using aec::Mat;

double time_s(const std::function<void()>& fn, int reps) {
  fn();  // warmup
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    fn();
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count() / reps;
}

void report(const char* name, double serial_s, double parallel_s) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

Mat random_mat(int rows, int cols, aec::Rng& rng) {
  Mat m(rows, cols);
  for (double& v : m.a) {
    v = rng.uniform(-1.0, 1.0);
  }
  return m;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  aec::Rng rng(7);

  {
    // FC-sized and GRU-sized matvecs, batched like one 10 s clip (999 frames).
    const Mat m = random_mat(322, 644, rng);
    std::vector<double> x(644), y(322);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const int frames = 999;
    report("matvec 322x644 x999",
           time_s([&] { for (int t = 0; t < frames; ++t) aec::kern::matvec_serial(m, x.data(), y.data()); }, 5),
           time_s([&] { for (int t = 0; t < frames; ++t) aec::kern::matvec(m, x.data(), y.data()); }, 5));
  }
  {
    Mat g(322, 644);
    std::vector<double> u(322), v(644);
    for (double& w : u) w = rng.uniform(-1.0, 1.0);
    for (double& w : v) w = rng.uniform(-1.0, 1.0);
    const int frames = 999;
    report("outer_acc 322x644 x999",
           time_s([&] { for (int t = 0; t < frames; ++t) aec::kern::outer_acc_serial(g, u.data(), v.data()); }, 5),
           time_s([&] { for (int t = 0; t < frames; ++t) aec::kern::outer_acc(g, u.data(), v.data()); }, 5));
  }
  {
    std::vector<double> a(1 << 20), b(1 << 20);
    for (double& v : a) v = rng.uniform(-1.0, 1.0);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);
    report("dot 1M",
           time_s([&] { (void)aec::kern::dot_serial(a, b); }, 20),
           time_s([&] { (void)aec::kern::dot(a, b); }, 20));
  }
  {
    aec::AudioClip clip;
    clip.sample_rate_hz = 16000;
    clip.samples.resize(160000);
    for (double& s : clip.samples) s = rng.uniform(-0.5, 0.5);
    // The STFT parallelizes over frames internally; compare 1 thread vs all.
    const int max_threads = omp_get_max_threads();
    const double t1 = time_s([&] {
      omp_set_num_threads(1);
      (void)aec::stft(clip);
    }, 5);
    const double tn = time_s([&] {
      omp_set_num_threads(max_threads);
      (void)aec::stft(clip);
    }, 5);
    omp_set_num_threads(max_threads);
    report("stft 10 s (1 vs N threads)", t1, tn);
  }
  {
    const aec::ModelConfig cfg;
    const aec::ModelWeights w = aec::ModelWeights::random_init(cfg, 3);
    Mat features = random_mat(300, cfg.input_dim(), rng);  // 3 s clip
    const int max_threads = omp_get_max_threads();
    const double t1 = time_s([&] {
      omp_set_num_threads(1);
      (void)aec::gru_forward(features, w);
    }, 3);
    const double tn = time_s([&] {
      omp_set_num_threads(max_threads);
      (void)aec::gru_forward(features, w);
    }, 3);
    omp_set_num_threads(max_threads);
    report("gru_forward 3 s (1 vs N)", t1, tn);
  }
  {
    aec::AudioClip mic, loop;
    mic.samples.resize(48000);
    loop.samples.resize(48000);
    for (std::size_t i = 0; i < loop.samples.size(); ++i) {
      loop.samples[i] = rng.uniform(-0.5, 0.5);
      mic.samples[i] = 0.3 * loop.samples[i];
    }
    aec::NlmsConfig cfg;
    cfg.num_taps = 3200;
    // Inherently sequential; timed for context, no parallel variant.
    const double t = time_s([&] { (void)aec::nlms_process(mic, loop, cfg); }, 1);
    std::printf("%-28s serial %9.3f ms   (sequential stage)\n", "nlms 3 s, 3200 taps", t * 1e3);
  }
  return 0;
}

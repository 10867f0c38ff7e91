#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aec {

// Dense row-major matrix of doubles. Everything in the toolkit is small
// enough to live in one of these; hot loops go through the kernels below.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
  double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return a.size(); }
  void fill(double v) { a.assign(a.size(), v); }
};

namespace kern {

// Parallel kernels and their serial references. Each parallel variant
// computes bit-identical output to its *_serial twin for any thread count:
// outputs are partitioned with no cross-thread accumulation, and reductions
// run over fixed-size chunks that are combined in chunk order.

inline constexpr std::size_t kDotChunk = 4096;

double dot_serial(std::span<const double> x, std::span<const double> y);
double dot(std::span<const double> x, std::span<const double> y);

// y = M x
void matvec_serial(const Mat& m, const double* x, double* y);
void matvec(const Mat& m, const double* x, double* y);

// y = M^T x
void matvec_t_serial(const Mat& m, const double* x, double* y);
void matvec_t(const Mat& m, const double* x, double* y);

// M += u v^T
void outer_acc_serial(Mat& m, const double* u, const double* v);
void outer_acc(Mat& m, const double* u, const double* v);

// Runs f(i) for i in [0, n). Static schedule; iterations must be independent.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& f) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    f(static_cast<std::size_t>(i));
  }
}

}  // namespace kern
}  // namespace aec

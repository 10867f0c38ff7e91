#include "aec/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace aec::kern {
namespace {

// Work below this many multiply-adds is not worth a parallel region.
constexpr std::size_t kMinParallelWork = 1 << 15;

double dot_plain(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += x[i] * y[i];
  }
  return acc;
}

}  // namespace

double dot_serial(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t nchunks = (n + kDotChunk - 1) / kDotChunk;
  double acc = 0.0;
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = c * kDotChunk;
    const std::size_t len = std::min(kDotChunk, n - lo);
    acc += dot_plain(x.data() + lo, y.data() + lo, len);
  }
  return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < kMinParallelWork) {
    return dot_serial(x, y);
  }
  const std::size_t nchunks = (n + kDotChunk - 1) / kDotChunk;
  std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kDotChunk;
    const std::size_t len = std::min(kDotChunk, n - lo);
    partial[c] = dot_plain(x.data() + lo, y.data() + lo, len);
  }
  double acc = 0.0;
  for (double p : partial) {
    acc += p;
  }
  return acc;
}

void matvec_serial(const Mat& m, const double* x, double* y) {
  for (int r = 0; r < m.rows; ++r) {
    y[r] = dot_plain(m.row(r), x, static_cast<std::size_t>(m.cols));
  }
}

void matvec(const Mat& m, const double* x, double* y) {
  if (m.size() < kMinParallelWork) {
    matvec_serial(m, x, y);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < m.rows; ++r) {
    y[r] = dot_plain(m.row(r), x, static_cast<std::size_t>(m.cols));
  }
}

void matvec_t_serial(const Mat& m, const double* x, double* y) {
  for (int c = 0; c < m.cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < m.rows; ++r) {
      acc += m(r, c) * x[r];
    }
    y[c] = acc;
  }
}

void matvec_t(const Mat& m, const double* x, double* y) {
  if (m.size() < kMinParallelWork) {
    matvec_t_serial(m, x, y);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int c = 0; c < m.cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < m.rows; ++r) {
      acc += m(r, c) * x[r];
    }
    y[c] = acc;
  }
}

void outer_acc_serial(Mat& m, const double* u, const double* v) {
  for (int r = 0; r < m.rows; ++r) {
    double* row = m.row(r);
    const double ur = u[r];
    for (int c = 0; c < m.cols; ++c) {
      row[c] += ur * v[c];
    }
  }
}

void outer_acc(Mat& m, const double* u, const double* v) {
  if (m.size() < kMinParallelWork) {
    outer_acc_serial(m, u, v);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < m.rows; ++r) {
    double* row = m.row(r);
    const double ur = u[r];
    for (int c = 0; c < m.cols; ++c) {
      row[c] += ur * v[c];
    }
  }
}

}  // namespace aec::kern

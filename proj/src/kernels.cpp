#include "hilonet/kernels.hpp"

#include <cmath>

namespace hilonet::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n4; i += 4) {
    lane[0] += a[i + 0] * b[i + 0];
    lane[1] += a[i + 1] * b[i + 1];
    lane[2] += a[i + 2] * b[i + 2];
    lane[3] += a[i + 3] * b[i + 3];
  }
  double s = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n4; i += 4) {
    const double d0 = a[i + 0] - b[i + 0];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    lane[0] += d0 * d0;
    lane[1] += d1 * d1;
    lane[2] += d2 * d2;
    lane[3] += d3 * d3;
  }
  double s = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = y[i] + alpha * x[i];
  }
}

void mix_scalar(double* t, const double* o, double tau, std::size_t n) {
  const double keep = 1.0 - tau;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = keep * t[i] + tau * o[i];
  }
}

void adam_scalar(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, double b1, double b2, double eps, double c1, double c2) {
  const double k1 = 1.0 - b1;
  const double k2 = 1.0 - b2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + k1 * g[i];
    v[i] = b2 * v[i] + k2 * (g[i] * g[i]);
    p[i] = p[i] - lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

const KernelTable kScalar = {
    "scalar", dot_scalar, sq_dist_scalar, axpy_scalar, mix_scalar, adam_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

#if !defined(HILONET_HAVE_AVX2_TU)
const KernelTable* avx2_table() { return nullptr; }
#endif

const KernelTable& active_table() {
  static const KernelTable* table = [] {
    const KernelTable* avx2 = avx2_table();
    return avx2 != nullptr ? avx2 : &kScalar;
  }();
  return *table;
}

}  // namespace hilonet::kern

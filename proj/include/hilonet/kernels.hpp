#pragma once
// Double-precision vector kernels behind the network and distance code.
//
// Reductions follow one fixed order on every path: four striped
// accumulator lanes over the main body, lanes combined as
// (l0 + l2) + (l1 + l3), then a sequential tail. The scalar and AVX2
// implementations share this order exactly, so their results agree bit
// for bit and runtime dispatch never changes a training run. Kernel
// translation units are built with fp-contract off to keep mul/add
// rounding identical on both paths.

#include <cstddef>
#include <span>
#include <stdexcept>

namespace hilonet::kern {

struct KernelTable {
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // t[i] = (1 - tau) * t[i] + tau * o[i]
  void (*mix)(double* t, const double* o, double tau, std::size_t n);
  // Adam update with precomputed bias corrections c1 = 1/(1-b1^t),
  // c2 = 1/(1-b2^t):
  //   m[i] = b1*m[i] + (1-b1)*g[i]
  //   v[i] = b2*v[i] + (1-b2)*g[i]*g[i]
  //   p[i] -= lr * (m[i]*c1) / (sqrt(v[i]*c2) + eps)
  void (*adam)(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double b1, double b2, double eps, double c1, double c2);
};

// Reference implementation, always present.
const KernelTable& scalar_table();

// AVX2 implementation; nullptr when the build or the CPU lacks support.
const KernelTable* avx2_table();

// Table selected at startup (AVX2 when available, scalar otherwise).
const KernelTable& active_table();

inline void check_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("kern: operand sizes differ");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a, b);
  return active_table().dot(a.data(), b.data(), a.size());
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  check_same_size(a, b);
  return active_table().sq_dist(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_same_size(x, y);
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

inline void mix(std::span<double> t, std::span<const double> o, double tau) {
  check_same_size(t, o);
  active_table().mix(t.data(), o.data(), tau, t.size());
}

}  // namespace hilonet::kern

#include "distill/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace distill::kernels {

namespace {

double scalar_reduce_max(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

double scalar_reduce_sum(const double* x, std::size_t n) {
  // Neumaier variant of Kahan summation.
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = s + x[i];
    if (std::fabs(s) >= std::fabs(x[i])) {
      c += (s - t) + x[i];
    } else {
      c += (x[i] - t) + s;
    }
    s = t;
  }
  return s + c;
}

double scalar_dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scalar_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scalar_scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void scalar_matvec(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = scalar_dot(w + r * cols, x, cols);
  }
}

void scalar_matvec_t(const double* w, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
  std::memset(y, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    scalar_axpy(x[r], w + r * cols, y, cols);
  }
}

void scalar_ger(const double* g, std::size_t rows, const double* x,
                std::size_t cols, double* w) {
  for (std::size_t r = 0; r < rows; ++r) {
    scalar_axpy(g[r], x, w + r * cols, cols);
  }
}

const Ops kScalarOps = {
    "scalar",      scalar_reduce_max, scalar_reduce_sum,
    scalar_dot,    scalar_axpy,       scalar_scale,
    scalar_matvec, scalar_matvec_t,   scalar_ger,
};

std::atomic<const Ops*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::Auto};

const Ops* resolve(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalarOps;
    case Backend::Avx2:
      if (!avx2_available()) {
        throw std::runtime_error("AVX2 backend requested but not available");
      }
      return &avx2_ops();
    case Backend::Auto:
    default:
      return avx2_available() ? &avx2_ops() : &kScalarOps;
  }
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = resolve(g_backend.load());
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void set_backend(Backend b) {
  g_backend.store(b);
  g_active.store(resolve(b), std::memory_order_release);
}

Backend current_backend() { return g_backend.load(); }

}  // namespace distill::kernels

#pragma once

// Low-level vector kernels backing the numerics and network modules.
// Scalar reference implementations always exist; an AVX2 variant is
// selected at runtime when the CPU supports it. Both variants are
// equivalence-tested against each other (reduction order differs, so
// agreement is to tolerance, not bit-exact).

#include <cstddef>

namespace distill::kernels {

struct Ops {
  const char* name;

  // max over n elements, n >= 1
  double (*reduce_max)(const double* x, std::size_t n);
  // Neumaier-compensated sum
  double (*reduce_sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x *= a
  void (*scale)(double a, double* x, std::size_t n);
  // y = W x, W row-major (rows x cols)
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // y = W^T x, W row-major (rows x cols), x has rows entries
  void (*matvec_t)(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
  // W += g x^T (rank-1 accumulate), W row-major (rows x cols)
  void (*ger)(const double* g, std::size_t rows, const double* x,
              std::size_t cols, double* w);
};

enum class Backend { Auto, Scalar, Avx2 };

const Ops& scalar_ops();
bool avx2_available();
const Ops& avx2_ops();  // valid only if avx2_available()

// Active backend used by the rest of the library. Auto picks AVX2 when
// available. set_backend is for tests and benchmarking; it is not
// thread-safe against concurrent kernel use.
const Ops& active();
void set_backend(Backend b);
Backend current_backend();

}  // namespace distill::kernels

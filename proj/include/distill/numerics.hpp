#pragma once

// Deterministic numeric primitives: temperature softmax, log-sum-exp,
// vector statistics, and a seedable RNG. Everything operates on 64-bit
// floats; logit vectors are plain std::vector<double> with K >= 2 and
// all entries finite.

#include <cstdint>
#include <string>
#include <vector>

namespace distill {

using Vec = std::vector<double>;

// Throws std::invalid_argument naming `what` if z has fewer than two
// entries or any non-finite entry.
void validate_logits(const Vec& z, const char* what = "logits");

// Throws std::invalid_argument unless t is finite and > 0.
void validate_temperature(double t);

// Throws std::invalid_argument unless a.size() == b.size().
void validate_same_dim(const Vec& a, const Vec& b);

// p_i = exp(z_i / t) / sum_j exp(z_j / t), max-subtraction stabilized.
Vec softmax(const Vec& z, double t);

// log p_i computed without forming p (max-subtraction stabilized).
Vec log_softmax(const Vec& z, double t);

// max(z) + log sum exp(z - max(z))
double log_sum_exp(const Vec& z);

// Compensated arithmetic mean.
double mean(const Vec& z);

double max_abs(const Vec& z);

// splitmix64-based generator: tiny, well known, and the stream is fully
// determined by the 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform();
  double uniform(double lo, double hi);
  // standard normal (Box-Muller, spare cached)
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Decorrelated child seed for run `index` of a seeded protocol.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace distill

#include "distill/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "distill/kernels.hpp"

namespace distill {

void validate_logits(const Vec& z, const char* what) {
  if (z.size() < 2) {
    throw std::invalid_argument(std::string(what) + ": need K >= 2 entries");
  }
  for (double v : z) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

void validate_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("temperature must be finite and > 0");
  }
}

void validate_same_dim(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch between logit vectors");
  }
}

Vec softmax(const Vec& z, double t) {
  validate_logits(z);
  validate_temperature(t);
  const auto& k = kernels::active();
  const std::size_t n = z.size();
  const double m = k.reduce_max(z.data(), n);
  Vec p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp((z[i] - m) / t);
  }
  const double s = k.reduce_sum(p.data(), n);
  k.scale(1.0 / s, p.data(), n);
  return p;
}

Vec log_softmax(const Vec& z, double t) {
  validate_logits(z);
  validate_temperature(t);
  const auto& k = kernels::active();
  const std::size_t n = z.size();
  const double m = k.reduce_max(z.data(), n);
  Vec u(n), e(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (z[i] - m) / t;
    e[i] = std::exp(u[i]);
  }
  const double lse = std::log(k.reduce_sum(e.data(), n));
  for (std::size_t i = 0; i < n; ++i) u[i] -= lse;
  return u;
}

double log_sum_exp(const Vec& z) {
  validate_logits(z);
  const auto& k = kernels::active();
  const std::size_t n = z.size();
  const double m = k.reduce_max(z.data(), n);
  Vec e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(z[i] - m);
  return m + std::log(k.reduce_sum(e.data(), n));
}

double mean(const Vec& z) {
  validate_logits(z);
  return kernels::active().reduce_sum(z.data(), z.size()) /
         static_cast<double>(z.size());
}

double max_abs(const Vec& z) {
  double m = 0.0;
  for (double v : z) m = std::max(m, std::fabs(v));
  return m;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  Rng r(base ^ (0x6a09e667f3bcc909ULL * (index + 1)));
  return r.next_u64();
}

}  // namespace distill

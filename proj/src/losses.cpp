#include "distill/losses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "distill/kernels.hpp"

namespace distill {

void validate_labels(const Vec& y) {
  if (y.size() < 2) {
    throw std::invalid_argument("labels: need K >= 2 entries");
  }
  double s = 0.0;
  for (double v : y) {
    if (!(v >= 0.0) || !(v <= 1.0)) {
      throw std::invalid_argument("labels: entry outside [0, 1]");
    }
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-12) {
    throw std::invalid_argument("labels: entries must sum to 1");
  }
}

double lm_loss(const Vec& z_t, const Vec& z_s) {
  validate_logits(z_t, "teacher logits");
  validate_logits(z_s, "student logits");
  validate_same_dim(z_t, z_s);
  const std::size_t n = z_t.size();
  Vec d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = z_t[i] - z_s[i];
  const double sq = kernels::active().dot(d.data(), d.data(), n);
  return sq / (2.0 * static_cast<double>(n));
}

double kd_loss(const Vec& z_t, const Vec& z_s, double t) {
  validate_same_dim(z_t, z_s);
  const Vec p_t = softmax(z_t, t);
  const Vec lp_t = log_softmax(z_t, t);
  const Vec lp_s = log_softmax(z_s, t);
  const std::size_t n = z_t.size();
  Vec terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (p_t[i] == 0.0) {
      terms[i] = 0.0;  // 0 log 0 := 0
    } else if (std::isinf(lp_s[i])) {
      return std::numeric_limits<double>::infinity();
    } else {
      terms[i] = p_t[i] * (lp_t[i] - lp_s[i]);
    }
  }
  const double v = kernels::active().reduce_sum(terms.data(), n);
  return v < 0.0 ? 0.0 : v;  // clamp rounding noise below true zero
}

double lm_reg_loss(const Vec& z_t, const Vec& z_s, const MeanOffsets& offsets,
                   int reg_sign) {
  if (reg_sign != 1 && reg_sign != -1) {
    throw std::invalid_argument("reg_sign must be +1 or -1");
  }
  if (!std::isfinite(offsets.c_s) || !std::isfinite(offsets.c_t)) {
    throw std::invalid_argument("mean offsets must be finite");
  }
  const double base = lm_loss(z_t, z_s);
  const double k = static_cast<double>(z_s.size());
  const double sum_s = kernels::active().reduce_sum(z_s.data(), z_s.size());
  return base + reg_sign * ((offsets.c_s - offsets.c_t) / k) * sum_s;
}

double ce_loss(const Vec& y, const Vec& z) {
  validate_labels(y);
  validate_logits(z);
  validate_same_dim(y, z);
  const double lin = kernels::active().dot(y.data(), z.data(), y.size());
  return -lin + log_sum_exp(z);
}

double ce_lower_bound(const Vec& y, const Vec& z) {
  validate_labels(y);
  validate_logits(z);
  validate_same_dim(y, z);
  const auto& k = kernels::active();
  const double lin = k.dot(y.data(), z.data(), y.size());
  return -lin + k.reduce_sum(z.data(), z.size());
}

}  // namespace distill

#include "distill/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace distill {

Vec grad_lm(const Vec& z_t, const Vec& z_s) {
  validate_logits(z_t, "teacher logits");
  validate_logits(z_s, "student logits");
  validate_same_dim(z_t, z_s);
  const double k = static_cast<double>(z_s.size());
  Vec g(z_s.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (z_s[i] - z_t[i]) / k;
  return g;
}

Vec grad_kd_scaled(const Vec& z_t, const Vec& z_s, double t) {
  validate_same_dim(z_t, z_s);
  const Vec p_t = softmax(z_t, t);
  const Vec p_s = softmax(z_s, t);
  Vec g(z_s.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = t * (p_s[i] - p_t[i]);
  // The exact gradient sums to zero because both probability vectors sum to
  // one; subtract the residual mean so softmax normalization rounding is not
  // amplified by t.
  const double m = mean(g);
  for (double& v : g) v -= m;
  return g;
}

Vec grad_ce(const Vec& y, const Vec& z) {
  validate_labels(y);
  validate_same_dim(y, z);
  const Vec p = softmax(z, 1.0);
  Vec g(z.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = p[i] - y[i];
  return g;
}

Vec grad_lm_reg(const Vec& z_t, const Vec& z_s, const MeanOffsets& offsets,
                int reg_sign) {
  if (reg_sign != 1 && reg_sign != -1) {
    throw std::invalid_argument("reg_sign must be +1 or -1");
  }
  Vec g = grad_lm(z_t, z_s);
  const double k = static_cast<double>(z_s.size());
  const double reg = reg_sign * (offsets.c_s - offsets.c_t) / k;
  for (double& v : g) v += reg;
  return g;
}

Vec limit_gradient(const Vec& z_t, const Vec& z_s) {
  validate_logits(z_t, "teacher logits");
  validate_logits(z_s, "student logits");
  validate_same_dim(z_t, z_s);
  const double k = static_cast<double>(z_s.size());
  const double dc = mean(z_s) - mean(z_t);
  Vec g(z_s.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = ((z_s[i] - z_t[i]) - dc) / k;
  }
  return g;
}

Vec fd_gradient(const LossFn& loss, const Vec& z, const FdConfig& cfg) {
  if (!(cfg.step >= 1e-8 && cfg.step <= 1e-2)) {
    throw std::invalid_argument("fd step must be in [1e-8, 1e-2]");
  }
  Vec g(z.size());
  Vec probe = z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    probe[i] = z[i] + cfg.step;
    const double up = loss(probe);
    probe[i] = z[i] - cfg.step;
    const double down = loss(probe);
    probe[i] = z[i];
    g[i] = (up - down) / (2.0 * cfg.step);
  }
  return g;
}

double max_rel_err(const Vec& a, const Vec& b) {
  validate_same_dim(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(1e-8, std::fabs(a[i]) + std::fabs(b[i]));
    worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
  }
  return worst;
}

double fd_noise_bound(double loss_value, double step) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return 8.0 * eps * std::max(1.0, std::fabs(loss_value)) / step + step * step;
}

bool fd_match(const Vec& analytic, const Vec& numeric, double noise_bound) {
  validate_same_dim(analytic, numeric);
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double f = numeric[i];
    if (std::fabs(a - f) >
        1e-6 * (std::fabs(a) + std::fabs(f)) + noise_bound) {
      return false;
    }
  }
  return true;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  validate_same_dim(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace distill

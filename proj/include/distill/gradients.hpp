#pragma once

// Analytic gradients of every loss with respect to the student logits,
// plus a central finite-difference oracle used to validate them.

#include <functional>

#include "distill/losses.hpp"

namespace distill {

struct FdConfig {
  double step = 1e-5;  // central-difference h, clamped to [1e-8, 1e-2]
};

// d lm_loss / d z_s_i = (z_s_i - z_t_i) / K
Vec grad_lm(const Vec& z_t, const Vec& z_s);

// d (T^2 kd_loss) / d z_s_i = T (p_s_i - p_t_i)
Vec grad_kd_scaled(const Vec& z_t, const Vec& z_s, double t);

// d ce_loss / d z_i = softmax(z, 1)_i - y_i
Vec grad_ce(const Vec& y, const Vec& z);

// d lm_reg_loss / d z_s_i = (z_s_i - z_t_i)/K + reg_sign (c_s - c_t)/K,
// with the offsets treated as frozen constants.
Vec grad_lm_reg(const Vec& z_t, const Vec& z_s, const MeanOffsets& offsets,
                int reg_sign);

// Infinite-temperature limit of grad_kd_scaled, in the mean-centered
// (shift-invariant) form:
//   (1/K) ((z_s_i - mean(z_s)) - (z_t_i - mean(z_t))).
// Computed as ((z_s_i - z_t_i) - (mean(z_s) - mean(z_t)))/K so that it
// equals grad_lm bit-for-bit whenever the two means coincide.
Vec limit_gradient(const Vec& z_t, const Vec& z_s);

using LossFn = std::function<double(const Vec&)>;

// Central two-point finite differences: (f(z + h e_i) - f(z - h e_i)) / 2h.
Vec fd_gradient(const LossFn& loss, const Vec& z, const FdConfig& cfg = {});

// max over components of |a_i - b_i| / max(1e-8, |a_i| + |b_i|)
double max_rel_err(const Vec& a, const Vec& b);

// Absolute error ceiling intrinsic to a central finite difference of a loss
// of magnitude |loss_value| in 64-bit arithmetic: rounding of the two loss
// evaluations contributes ~eps|L|/h and truncation contributes O(h^2).
double fd_noise_bound(double loss_value, double step = 1e-5);

// True when every component satisfies
//   |a_i - f_i| <= 1e-6 (|a_i| + |f_i|) + noise_bound,
// i.e. the analytic and finite-difference gradients agree to six relative
// digits wherever the difference quotient can resolve them at all.
bool fd_match(const Vec& analytic, const Vec& numeric, double noise_bound);

double max_abs_diff(const Vec& a, const Vec& b);

}  // namespace distill

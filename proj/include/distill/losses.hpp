#pragma once

// Scalar losses: logits matching, knowledge distillation (KL between
// temperature-softened distributions), regularized logits matching,
// cross-entropy, and its Jensen lower bound.

#include "distill/numerics.hpp"

namespace distill {

// Initial logits means of student (c_s) and teacher (c_t), held fixed.
struct MeanOffsets {
  double c_s = 0.0;
  double c_t = 0.0;
};

// Throws std::invalid_argument unless y is in [0,1]^K and sums to 1
// within 1e-12 (one-hot or soft labels).
void validate_labels(const Vec& y);

// (1/2K) sum_i (z_t_i - z_s_i)^2
double lm_loss(const Vec& z_t, const Vec& z_s);

// KL(softmax(z_t,T) || softmax(z_s,T)), full divergence including the
// teacher entropy term, so the result is >= 0. Returns +infinity if the
// student distribution vanishes where the teacher does not.
double kd_loss(const Vec& z_t, const Vec& z_s, double t);

// lm_loss + reg_sign * ((c_s - c_t)/K) * sum_i z_s_i. The additive
// constant of the regularized form is dropped. reg_sign must be +1 or -1.
double lm_reg_loss(const Vec& z_t, const Vec& z_s, const MeanOffsets& offsets,
                   int reg_sign);

// -sum_i y_i z_i + log_sum_exp(z), temperature fixed at 1.
double ce_loss(const Vec& y, const Vec& z);

// -sum_i y_i z_i + sum_j z_j. Lower-bounds ce_loss only under the
// zero-mean (or small-mean) logits condition; see tests for the
// counterexample z = (10, 10).
double ce_lower_bound(const Vec& y, const Vec& z);

}  // namespace distill

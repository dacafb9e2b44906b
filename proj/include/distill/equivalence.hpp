#pragma once

// Executable form of the central analysis: zero-sum gradient audits,
// temperature sweeps measuring how fast the scaled KD gradient converges
// to a candidate limit form, log-log rate fitting, and the equal-mean
// equivalence report.

#include <string>

#include "distill/gradients.hpp"

namespace distill {

// The three candidate infinite-temperature limit forms the sweep can
// test the scaled KD gradient against.
enum class LimitCandidate {
  MeanCentered,      // (1/K)((z_s - mean(z_s)) - (z_t - mean(z_t)))
  PrintedPlusSign,   // (1/K)(z_s - z_t + (c_s - c_t)), the published form
  PlainLm,           // (1/K)(z_s - z_t)
};

const char* candidate_name(LimitCandidate c);
Vec candidate_gradient(LimitCandidate c, const Vec& z_t, const Vec& z_s);

struct SweepResult {
  std::vector<double> temperatures;  // strictly increasing
  std::vector<double> errors;        // max-norm gap per temperature
  double fitted_rate = 0.0;          // OLS slope of log error vs log T
  bool degenerate = false;           // fewer than 2 points above 1e-13
  LimitCandidate candidate = LimitCandidate::MeanCentered;
};

enum class Verdict { ExactEquivalent, EquivalentWithRegularizer };

struct EquivalenceReport {
  double c_s = 0.0;
  double c_t = 0.0;
  double max_gap_at_tmax = 0.0;  // |grad_kd_scaled(T_max) - grad_lm| max-norm
  double reg_term_magnitude = 0.0;  // |c_s - c_t| / K
  Verdict verdict = Verdict::ExactEquivalent;
};

// |sum_i grad_kd_scaled_i|; an algebraic identity says this is 0.
double check_zero_sum(const Vec& z_t, const Vec& z_s, double t);

// |sum_i grad_ce_i|
double check_zero_sum_ce(const Vec& y, const Vec& z);

// Requires t_grid strictly ascending with min >= 10 * max|z| (Taylor
// regime). Points with error <= 1e-13 are excluded from the rate fit as
// rounding-dominated; with fewer than two usable points the result is
// flagged degenerate and fitted_rate is NaN.
SweepResult temperature_sweep(const Vec& z_t, const Vec& z_s,
                              const std::vector<double>& t_grid,
                              LimitCandidate candidate);

// Requires t_max >= 100 * max|z|. Verdict is ExactEquivalent iff
// |c_s - c_t| <= tol.
EquivalenceReport equivalence_report(const Vec& z_t, const Vec& z_s,
                                     double t_max, double tol = 1e-9);

}  // namespace distill

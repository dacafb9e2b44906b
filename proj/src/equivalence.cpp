#include "distill/equivalence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "distill/kernels.hpp"

namespace distill {

const char* candidate_name(LimitCandidate c) {
  switch (c) {
    case LimitCandidate::MeanCentered:
      return "mean-centered";
    case LimitCandidate::PrintedPlusSign:
      return "printed-plus-sign";
    case LimitCandidate::PlainLm:
      return "plain-lm";
  }
  return "?";
}

Vec candidate_gradient(LimitCandidate c, const Vec& z_t, const Vec& z_s) {
  switch (c) {
    case LimitCandidate::MeanCentered:
      return limit_gradient(z_t, z_s);
    case LimitCandidate::PrintedPlusSign: {
      MeanOffsets off{mean(z_s), mean(z_t)};
      return grad_lm_reg(z_t, z_s, off, +1);
    }
    case LimitCandidate::PlainLm:
      return grad_lm(z_t, z_s);
  }
  throw std::invalid_argument("unknown limit candidate");
}

double check_zero_sum(const Vec& z_t, const Vec& z_s, double t) {
  const Vec g = grad_kd_scaled(z_t, z_s, t);
  return std::fabs(kernels::active().reduce_sum(g.data(), g.size()));
}

double check_zero_sum_ce(const Vec& y, const Vec& z) {
  const Vec g = grad_ce(y, z);
  return std::fabs(kernels::active().reduce_sum(g.data(), g.size()));
}

SweepResult temperature_sweep(const Vec& z_t, const Vec& z_s,
                              const std::vector<double>& t_grid,
                              LimitCandidate candidate) {
  validate_same_dim(z_t, z_s);
  if (t_grid.size() < 2) {
    throw std::invalid_argument("temperature grid needs >= 2 points");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("temperature grid must be strictly ascending");
    }
  }
  const double scale = std::max(max_abs(z_t), max_abs(z_s));
  if (t_grid.front() < 10.0 * scale) {
    throw std::invalid_argument(
        "temperature grid starts below the Taylor regime (need T >= 10 max|z|)");
  }

  SweepResult res;
  res.candidate = candidate;
  res.temperatures = t_grid;
  const Vec target = candidate_gradient(candidate, z_t, z_s);
  res.errors.reserve(t_grid.size());
  for (double t : t_grid) {
    res.errors.push_back(max_abs_diff(grad_kd_scaled(z_t, z_s, t), target));
  }

  // OLS slope of log(error) against log(T) over usable points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (res.errors[i] <= 1e-13) continue;
    const double x = std::log(t_grid[i]);
    const double y = std::log(res.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) {
    res.degenerate = true;
    res.fitted_rate = std::numeric_limits<double>::quiet_NaN();
  } else {
    res.fitted_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return res;
}

EquivalenceReport equivalence_report(const Vec& z_t, const Vec& z_s,
                                     double t_max, double tol) {
  validate_same_dim(z_t, z_s);
  validate_temperature(t_max);
  const double scale = std::max(max_abs(z_t), max_abs(z_s));
  if (t_max < 100.0 * scale) {
    throw std::invalid_argument("t_max must be >= 100 * max|z|");
  }
  EquivalenceReport rep;
  rep.c_s = mean(z_s);
  rep.c_t = mean(z_t);
  rep.max_gap_at_tmax =
      max_abs_diff(grad_kd_scaled(z_t, z_s, t_max), grad_lm(z_t, z_s));
  rep.reg_term_magnitude =
      std::fabs(rep.c_s - rep.c_t) / static_cast<double>(z_s.size());
  rep.verdict = std::fabs(rep.c_s - rep.c_t) <= tol
                    ? Verdict::ExactEquivalent
                    : Verdict::EquivalentWithRegularizer;
  return rep;
}

}  // namespace distill

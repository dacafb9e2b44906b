#pragma once

// Minimal dense network with manual backpropagation, zero-mean
// initialization schemes, logits-mean statistics, and the two trainers
// (direct logit descent and the KD-vs-limit trajectory comparison).

#include <cstdint>
#include <functional>
#include <string>

#include "distill/gradients.hpp"

namespace distill {

struct InitScheme {
  enum class Kind { UniformSymmetric, Normal };
  enum class ScaleRule { FanAvg, FanIn };

  Kind kind = Kind::UniformSymmetric;
  ScaleRule rule = ScaleRule::FanAvg;
  std::uint64_t seed = 0;
  double gain = 1.0;  // gain 0 gives the degenerate all-zero network

  std::string id() const;
};

struct MlpModel {
  std::vector<std::size_t> layer_dims;  // [d_0, ..., d_L], d_L = K
  std::vector<Vec> weights;             // row-major, d_out x d_in per layer
  std::vector<Vec> biases;              // d_out per layer, start at zero
  std::string init_scheme_id;

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
};

struct ParamGrads {
  std::vector<Vec> weights;
  std::vector<Vec> biases;
};

struct LogitMeanStats {
  std::size_t runs = 0;
  std::vector<double> per_run_means;
  double grand_mean = 0.0;
  double std_error = 0.0;
};

struct TrajectoryRecord {
  std::size_t step_index = 0;
  double logits_mean_s = 0.0;
  double logits_mean_t = 0.0;
  double param_distance = 0.0;  // max-norm between the two students' params
  double grad_gap = 0.0;        // max-norm between their param gradients
};

struct Sample {
  Vec input;
  Vec label;  // one-hot (or soft) over K classes
};

// Weights i.i.d. from the scheme's zero-mean distribution, biases zero.
// Deterministic in the scheme seed. ReLU on hidden layers.
MlpModel init_model(const std::vector<std::size_t>& layer_dims,
                    const InitScheme& scheme);

Vec forward(const MlpModel& model, const Vec& x);

// Gradients of a scalar loss with respect to all parameters, given the
// loss gradient at the logits.
ParamGrads backward(const MlpModel& model, const Vec& x, const Vec& logit_grad);

ParamGrads zero_grads(const MlpModel& model);
void accumulate(ParamGrads& acc, const ParamGrads& g, double weight = 1.0);
void apply_update(MlpModel& model, const ParamGrads& g, double lr);
double param_max_dist(const MlpModel& a, const MlpModel& b);
double grads_max_dist(const ParamGrads& a, const ParamGrads& b);

// Per-run logit mean over the probe batch across `runs` fresh
// initializations (run r uses the seed derived from scheme.seed and r).
// Runs may be dispatched to `workers` threads; the aggregation is a
// seed-ordered reduction, so the result is independent of worker count.
LogitMeanStats logit_mean_statistics(const std::vector<std::size_t>& layer_dims,
                                     const InitScheme& scheme, std::size_t runs,
                                     const std::vector<Vec>& probe_batch,
                                     std::size_t workers = 1);

using LogitGradFn = std::function<Vec(const Vec&)>;

// Plain gradient descent directly on a logit vector (logits as free
// parameters). Records mean(z) per step in logits_mean_s. Throws
// std::runtime_error if any logit exceeds 1e12 in magnitude.
std::vector<TrajectoryRecord> direct_logit_descent(const Vec& z0,
                                                   const LogitGradFn& grad_fn,
                                                   std::size_t steps, double lr);

// Clones student_init into two students: A trained with grad_kd_scaled at
// temperature t, B with the mean-centered limit gradient; both see the
// same full batch each step. Records per-step parameter distance and the
// gap between the two students' parameter gradients.
std::vector<TrajectoryRecord> train_compare(const MlpModel& teacher,
                                            const MlpModel& student_init,
                                            const std::vector<Sample>& data,
                                            double t, std::size_t steps,
                                            double lr);

// CE training helper (used to pretrain teachers and for dataset sanity).
void train_ce(MlpModel& model, const std::vector<Sample>& data,
              std::size_t steps, double lr);

double accuracy(const MlpModel& model, const std::vector<Sample>& data);

}  // namespace distill

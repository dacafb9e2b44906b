#include "distill/network.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "distill/kernels.hpp"

namespace distill {

namespace {

double scheme_scale(const InitScheme& s, std::size_t fan_in,
                    std::size_t fan_out) {
  const double fi = static_cast<double>(fan_in);
  const double fa = 0.5 * (static_cast<double>(fan_in) + static_cast<double>(fan_out));
  const double denom = s.rule == InitScheme::ScaleRule::FanIn ? fi : fa;
  if (s.kind == InitScheme::Kind::UniformSymmetric) {
    // uniform on [-limit, limit] with variance 1/denom
    return s.gain * std::sqrt(3.0 / denom);
  }
  return s.gain * std::sqrt(1.0 / denom);  // normal std
}

struct ForwardCache {
  std::vector<Vec> activations;  // activations[0] = x, then post-ReLU
  std::vector<Vec> preacts;      // pre-activation per layer
};

ForwardCache forward_cached(const MlpModel& model, const Vec& x) {
  if (x.size() != model.input_dim()) {
    throw std::invalid_argument("input dimension mismatch");
  }
  const auto& k = kernels::active();
  ForwardCache cache;
  cache.activations.push_back(x);
  const std::size_t n_layers = model.num_layers();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t rows = model.layer_dims[l + 1];
    const std::size_t cols = model.layer_dims[l];
    Vec z(rows);
    k.matvec(model.weights[l].data(), rows, cols,
             cache.activations.back().data(), z.data());
    for (std::size_t r = 0; r < rows; ++r) z[r] += model.biases[l][r];
    cache.preacts.push_back(z);
    if (l + 1 < n_layers) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;  // ReLU on hidden layers
    }
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

}  // namespace

std::string InitScheme::id() const {
  std::string s = kind == Kind::UniformSymmetric ? "uniform" : "normal";
  s += rule == ScaleRule::FanIn ? "/fan-in" : "/fan-avg";
  if (gain != 1.0) s += "/gain=" + std::to_string(gain);
  return s;
}

MlpModel init_model(const std::vector<std::size_t>& layer_dims,
                    const InitScheme& scheme) {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("need at least one layer (two dims)");
  }
  for (std::size_t d : layer_dims) {
    if (d == 0) throw std::invalid_argument("layer dimension must be positive");
  }
  MlpModel m;
  m.layer_dims = layer_dims;
  m.init_scheme_id = scheme.id();
  Rng rng(scheme.seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t rows = layer_dims[l + 1];
    const std::size_t cols = layer_dims[l];
    const double scale = scheme_scale(scheme, cols, rows);
    Vec w(rows * cols);
    if (scheme.kind == InitScheme::Kind::UniformSymmetric) {
      for (double& v : w) v = rng.uniform(-scale, scale);
    } else {
      for (double& v : w) v = scale * rng.normal();
    }
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(rows, 0.0);
  }
  return m;
}

Vec forward(const MlpModel& model, const Vec& x) {
  return forward_cached(model, x).activations.back();
}

ParamGrads backward(const MlpModel& model, const Vec& x,
                    const Vec& logit_grad) {
  if (logit_grad.size() != model.output_dim()) {
    throw std::invalid_argument("logit gradient dimension mismatch");
  }
  const auto& k = kernels::active();
  const ForwardCache cache = forward_cached(model, x);
  ParamGrads g = zero_grads(model);
  Vec delta = logit_grad;
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const std::size_t rows = model.layer_dims[l + 1];
    const std::size_t cols = model.layer_dims[l];
    k.ger(delta.data(), rows, cache.activations[l].data(), cols,
          g.weights[l].data());
    g.biases[l] = delta;
    if (l > 0) {
      Vec prev(cols);
      k.matvec_t(model.weights[l].data(), rows, cols, delta.data(),
                 prev.data());
      const Vec& pre = cache.preacts[l - 1];
      for (std::size_t i = 0; i < cols; ++i) {
        if (pre[i] <= 0.0) prev[i] = 0.0;
      }
      delta = std::move(prev);
    }
  }
  return g;
}

ParamGrads zero_grads(const MlpModel& model) {
  ParamGrads g;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    g.weights.emplace_back(model.weights[l].size(), 0.0);
    g.biases.emplace_back(model.biases[l].size(), 0.0);
  }
  return g;
}

void accumulate(ParamGrads& acc, const ParamGrads& g, double weight) {
  const auto& k = kernels::active();
  for (std::size_t l = 0; l < acc.weights.size(); ++l) {
    k.axpy(weight, g.weights[l].data(), acc.weights[l].data(),
           acc.weights[l].size());
    k.axpy(weight, g.biases[l].data(), acc.biases[l].data(),
           acc.biases[l].size());
  }
}

void apply_update(MlpModel& model, const ParamGrads& g, double lr) {
  const auto& k = kernels::active();
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    k.axpy(-lr, g.weights[l].data(), model.weights[l].data(),
           model.weights[l].size());
    k.axpy(-lr, g.biases[l].data(), model.biases[l].data(),
           model.biases[l].size());
  }
}

namespace {

double max_dist(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    for (std::size_t i = 0; i < a[l].size(); ++i) {
      worst = std::max(worst, std::fabs(a[l][i] - b[l][i]));
    }
  }
  return worst;
}

}  // namespace

double param_max_dist(const MlpModel& a, const MlpModel& b) {
  return std::max(max_dist(a.weights, b.weights), max_dist(a.biases, b.biases));
}

double grads_max_dist(const ParamGrads& a, const ParamGrads& b) {
  return std::max(max_dist(a.weights, b.weights), max_dist(a.biases, b.biases));
}

LogitMeanStats logit_mean_statistics(const std::vector<std::size_t>& layer_dims,
                                     const InitScheme& scheme, std::size_t runs,
                                     const std::vector<Vec>& probe_batch,
                                     std::size_t workers) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (probe_batch.empty()) throw std::invalid_argument("probe batch is empty");

  LogitMeanStats stats;
  stats.runs = runs;
  stats.per_run_means.assign(runs, 0.0);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      InitScheme s = scheme;
      s.seed = derive_seed(scheme.seed, r);
      const MlpModel model = init_model(layer_dims, s);
      double acc = 0.0;
      for (const Vec& x : probe_batch) {
        const Vec z = forward(model, x);
        acc += kernels::active().reduce_sum(z.data(), z.size()) /
               static_cast<double>(z.size());
      }
      stats.per_run_means[r] = acc / static_cast<double>(probe_batch.size());
    }
  };

  if (workers <= 1 || runs < 2) {
    run_range(0, runs);
  } else {
    const std::size_t n = std::min<std::size_t>(workers, runs);
    std::vector<std::thread> pool;
    const std::size_t chunk = (runs + n - 1) / n;
    for (std::size_t w = 0; w < n; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(runs, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  stats.grand_mean =
      kernels::active().reduce_sum(stats.per_run_means.data(), runs) /
      static_cast<double>(runs);
  if (runs > 1) {
    double ss = 0.0;
    for (double v : stats.per_run_means) {
      const double d = v - stats.grand_mean;
      ss += d * d;
    }
    stats.std_error = std::sqrt(ss / static_cast<double>(runs - 1)) /
                      std::sqrt(static_cast<double>(runs));
  }
  return stats;
}

std::vector<TrajectoryRecord> direct_logit_descent(const Vec& z0,
                                                   const LogitGradFn& grad_fn,
                                                   std::size_t steps, double lr) {
  validate_logits(z0, "initial logits");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  Vec z = z0;
  std::vector<TrajectoryRecord> records;
  records.reserve(steps + 1);
  records.push_back({0, mean(z), 0.0, 0.0, 0.0});
  for (std::size_t s = 1; s <= steps; ++s) {
    const Vec g = grad_fn(z);
    kernels::active().axpy(-lr, g.data(), z.data(), z.size());
    for (double v : z) {
      if (!(std::fabs(v) <= 1e12)) {
        throw std::runtime_error("logit descent diverged (|z| > 1e12)");
      }
    }
    records.push_back({s, mean(z), 0.0, 0.0, 0.0});
  }
  return records;
}

std::vector<TrajectoryRecord> train_compare(const MlpModel& teacher,
                                            const MlpModel& student_init,
                                            const std::vector<Sample>& data,
                                            double t, std::size_t steps,
                                            double lr) {
  if (teacher.input_dim() != student_init.input_dim() ||
      teacher.output_dim() != student_init.output_dim()) {
    throw std::invalid_argument("teacher/student shape mismatch");
  }
  if (data.empty()) throw std::invalid_argument("empty training data");
  validate_temperature(t);

  MlpModel a = student_init;  // scaled KD gradient at temperature t
  MlpModel b = student_init;  // mean-centered limit gradient
  const double inv_n = 1.0 / static_cast<double>(data.size());

  std::vector<TrajectoryRecord> records;
  records.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    ParamGrads ga = zero_grads(a);
    ParamGrads gb = zero_grads(b);
    double mean_s = 0.0, mean_t = 0.0;
    for (const Sample& sample : data) {
      const Vec zt = forward(teacher, sample.input);
      const Vec za = forward(a, sample.input);
      const Vec zb = forward(b, sample.input);
      mean_t += mean(zt) * inv_n;
      mean_s += mean(za) * inv_n;
      accumulate(ga, backward(a, sample.input, grad_kd_scaled(zt, za, t)),
                 inv_n);
      accumulate(gb, backward(b, sample.input, limit_gradient(zt, zb)), inv_n);
      for (double v : za) {
        if (!(std::fabs(v) <= 1e12)) {
          throw std::runtime_error("training diverged (|logit| > 1e12)");
        }
      }
    }
    const double gap = grads_max_dist(ga, gb);
    apply_update(a, ga, lr);
    apply_update(b, gb, lr);
    records.push_back({s, mean_s, mean_t, param_max_dist(a, b), gap});
  }
  return records;
}

void train_ce(MlpModel& model, const std::vector<Sample>& data,
              std::size_t steps, double lr) {
  if (data.empty()) throw std::invalid_argument("empty training data");
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t s = 0; s < steps; ++s) {
    ParamGrads g = zero_grads(model);
    for (const Sample& sample : data) {
      const Vec z = forward(model, sample.input);
      accumulate(g, backward(model, sample.input, grad_ce(sample.label, z)),
                 inv_n);
    }
    apply_update(model, g, lr);
  }
}

double accuracy(const MlpModel& model, const std::vector<Sample>& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Sample& sample : data) {
    const Vec z = forward(model, sample.input);
    std::size_t pred = 0, truth = 0;
    for (std::size_t i = 1; i < z.size(); ++i) {
      if (z[i] > z[pred]) pred = i;
      if (sample.label[i] > sample.label[truth]) truth = i;
    }
    hits += pred == truth;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace distill

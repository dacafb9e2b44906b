#include "distill/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "distill/dataset.hpp"
#include "distill/equivalence.hpp"
#include "distill/network.hpp"

namespace distill {

namespace {

struct RunOutcome {
  ReportTable table;
  std::string summary;   // key metric for the one-line stdout summary
  std::string failure;   // empty = all invariants held
};

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t k = std::min(workers, n);
  const std::size_t chunk = (n + k - 1) / k;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < k; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

Vec random_logits(Rng& rng, std::size_t k, double amplitude) {
  Vec z(k);
  for (double& v : z) v = rng.uniform(-amplitude, amplitude);
  return z;
}

// ---- gradcheck ------------------------------------------------------

struct GradCheckRow {
  std::string loss_name;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double max_rel_err = 0.0;
  double zero_sum_abs = 0.0;
  bool pass = false;
  std::string invariant;
};

GradCheckRow gradcheck_one(const std::string& loss_name, std::size_t k,
                           std::uint64_t seed, int reg_sign) {
  Rng rng(seed);
  const Vec z_t = random_logits(rng, k, 5.0);
  const Vec z_s = random_logits(rng, k, 5.0);
  const FdConfig fd{1e-5};

  GradCheckRow row;
  row.loss_name = loss_name;
  row.k = k;
  row.seed = seed;
  row.invariant = "fd-match-within-noise";

  Vec analytic;
  LossFn loss_fn;
  double zero_sum = 0.0;
  bool zero_sum_checked = false;
  if (loss_name == "lm") {
    analytic = grad_lm(z_t, z_s);
    loss_fn = [&](const Vec& z) { return lm_loss(z_t, z); };
    zero_sum = std::fabs(mean(z_s) - mean(z_t));  // informational: sums to K*(c_s-c_t)/K
  } else if (loss_name == "kd") {
    const double t = rng.uniform(0.5, 4.0);
    analytic = grad_kd_scaled(z_t, z_s, t);
    loss_fn = [&, t](const Vec& z) { return t * t * kd_loss(z_t, z, t); };
    zero_sum = check_zero_sum(z_t, z_s, t);
    zero_sum_checked = true;
  } else if (loss_name == "ce") {
    Vec y(k, 0.0);
    if (rng.uniform() < 0.5) {
      y[rng.next_u64() % k] = 1.0;  // one-hot
    } else {
      double s = 0.0;
      for (double& v : y) s += (v = rng.uniform());
      for (double& v : y) v /= s;  // soft label
    }
    analytic = grad_ce(y, z_s);
    loss_fn = [&, y](const Vec& z) { return ce_loss(y, z); };
    zero_sum = check_zero_sum_ce(y, z_s);
    zero_sum_checked = true;
  } else {  // lm-reg
    const MeanOffsets off{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    analytic = grad_lm_reg(z_t, z_s, off, reg_sign);
    loss_fn = [&, off](const Vec& z) {
      return lm_reg_loss(z_t, z, off, reg_sign);
    };
    zero_sum = 0.0;
  }

  const Vec numeric = fd_gradient(loss_fn, z_s, fd);
  row.max_rel_err = max_rel_err(analytic, numeric);
  row.zero_sum_abs = zero_sum;
  row.pass = fd_match(analytic, numeric, fd_noise_bound(loss_fn(z_s), fd.step));
  if (zero_sum_checked) {
    row.pass = row.pass && zero_sum <= 1e-12;
    row.invariant += ",zero-sum<=1e-12";
  }
  return row;
}

RunOutcome run_gradcheck(const ExperimentConfig& cfg, std::size_t workers) {
  const std::vector<std::size_t> ks =
      cfg.k ? std::vector<std::size_t>{cfg.k}
            : std::vector<std::size_t>{2, 3, 10, 100};
  const std::size_t per_cell = cfg.runs ? cfg.runs : 250;
  const std::vector<std::string> losses = {"lm", "kd", "ce", "lm-reg"};

  struct Job {
    std::string loss;
    std::size_t k;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  std::uint64_t idx = 0;
  for (const auto& loss : losses) {
    for (std::size_t k : ks) {
      for (std::size_t i = 0; i < per_cell; ++i) {
        jobs.push_back({loss, k, derive_seed(cfg.seed, idx++)});
      }
    }
  }

  std::vector<GradCheckRow> rows(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    rows[i] = gradcheck_one(jobs[i].loss, jobs[i].k, jobs[i].seed, cfg.reg_sign);
  });

  RunOutcome out;
  out.table.columns = {"loss_name", "K",    "seed",     "max_rel_err",
                       "zero_sum_abs", "pass", "invariant"};
  double worst = 0.0;
  for (const auto& r : rows) {
    out.table.add_row({r.loss_name, static_cast<std::int64_t>(r.k),
                       static_cast<std::int64_t>(r.seed), r.max_rel_err,
                       r.zero_sum_abs, r.pass, r.invariant});
    worst = std::max(worst, r.max_rel_err);
    if (!r.pass && out.failure.empty()) {
      out.failure = r.loss_name + " K=" + std::to_string(r.k) +
                    " violated " + r.invariant;
    }
  }
  out.summary = "instances=" + std::to_string(rows.size()) +
                " worst_rel_err=" + format_double(worst);
  return out;
}

// ---- sweep ----------------------------------------------------------

RunOutcome run_sweep(const ExperimentConfig& cfg, std::size_t workers) {
  const std::size_t n = cfg.runs ? cfg.runs : 100;
  const std::size_t k = cfg.k ? cfg.k : 10;
  const double amplitude = 5.0;
  if (cfg.t_grid.front() < 10.0 * amplitude) {
    throw ConfigError("t-grid: sweep requires min T >= 10 * max|z| (= " +
                      format_double(10.0 * amplitude) + ")");
  }
  const std::vector<LimitCandidate> candidates = {
      LimitCandidate::MeanCentered, LimitCandidate::PrintedPlusSign,
      LimitCandidate::PlainLm};

  struct InstanceResult {
    std::uint64_t seed;
    double c_s, c_t;
    std::vector<SweepResult> sweeps;
  };
  std::vector<InstanceResult> results(n);
  parallel_for(n, workers, [&](std::size_t i) {
    InstanceResult& r = results[i];
    r.seed = derive_seed(cfg.seed, i);
    Rng rng(r.seed);
    const Vec z_t = random_logits(rng, k, amplitude);
    const Vec z_s = random_logits(rng, k, amplitude);
    r.c_s = mean(z_s);
    r.c_t = mean(z_t);
    for (auto c : candidates) {
      r.sweeps.push_back(temperature_sweep(z_t, z_s, cfg.t_grid, c));
    }
  });

  RunOutcome out;
  out.table.columns = {"instance", "candidate",  "K",          "seed",
                       "c_s",      "c_t",        "T",          "error",
                       "fitted_rate", "plateau_pred", "converged"};
  double rate_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = results[i];
    const double plateau = 2.0 * std::fabs(r.c_s - r.c_t) / static_cast<double>(k);
    for (const auto& sw : r.sweeps) {
      const bool converged = !sw.degenerate && sw.fitted_rate < -0.5;
      for (std::size_t j = 0; j < sw.temperatures.size(); ++j) {
        out.table.add_row({static_cast<std::int64_t>(i),
                           std::string(candidate_name(sw.candidate)),
                           static_cast<std::int64_t>(k),
                           static_cast<std::int64_t>(r.seed), r.c_s, r.c_t,
                           sw.temperatures[j], sw.errors[j], sw.fitted_rate,
                           plateau, converged});
      }
      if (sw.candidate == LimitCandidate::MeanCentered) {
        rate_sum += sw.fitted_rate;
      }
    }
  }
  out.summary = "instances=" + std::to_string(n) + " mean_centered_rate=" +
                format_double(rate_sum / static_cast<double>(n));
  return out;
}

// ---- init-stats -----------------------------------------------------

RunOutcome run_init_stats(const ExperimentConfig& cfg, std::size_t workers) {
  const std::size_t runs = cfg.runs ? cfg.runs : 1000;
  const std::size_t k = cfg.k ? cfg.k : 100;
  std::vector<std::size_t> dims = cfg.layer_dims;
  if (dims.empty()) dims = {16, 32, 32, k};

  // 64 probe inputs from the synthetic generator, fixed by a dedicated seed.
  const std::size_t probe_classes = std::min<std::size_t>(k, 8);
  const SyntheticDataset probe_src = generate_dataset(
      probe_classes, dims.front(), (64 + probe_classes - 1) / probe_classes,
      1.0, derive_seed(cfg.seed, 0xb10b));
  std::vector<Vec> probe;
  for (std::size_t i = 0; i < 64 && i < probe_src.samples.size(); ++i) {
    probe.push_back(probe_src.samples[i].input);
  }

  struct SchemeSpec {
    const char* label;
    InitScheme scheme;
  };
  const std::vector<SchemeSpec> schemes = {
      {"uniform/fan-avg",
       {InitScheme::Kind::UniformSymmetric, InitScheme::ScaleRule::FanAvg, cfg.seed}},
      {"uniform/fan-in",
       {InitScheme::Kind::UniformSymmetric, InitScheme::ScaleRule::FanIn, cfg.seed}},
      {"normal/fan-avg",
       {InitScheme::Kind::Normal, InitScheme::ScaleRule::FanAvg, cfg.seed}},
      {"normal/fan-in",
       {InitScheme::Kind::Normal, InitScheme::ScaleRule::FanIn, cfg.seed}},
  };

  RunOutcome out;
  out.table.columns = {"scheme",    "runs",          "K",
                       "grand_mean", "std_error",    "four_sigma_pass",
                       "abs_mean_pass"};
  for (const auto& s : schemes) {
    const LogitMeanStats stats =
        logit_mean_statistics(dims, s.scheme, runs, probe, workers);
    const bool four_sigma =
        std::fabs(stats.grand_mean) <= 4.0 * stats.std_error;
    const bool abs_ok = std::fabs(stats.grand_mean) <= 0.05;
    out.table.add_row({std::string(s.label), static_cast<std::int64_t>(runs),
                       static_cast<std::int64_t>(k), stats.grand_mean,
                       stats.std_error, four_sigma, abs_ok});
    // Only the four-sigma check is a hard invariant: it is calibrated to the
    // run count, while the fixed +/-0.05 window is meaningful only at the
    // default 1000-run scale and stays a reported column.
    if (!four_sigma && out.failure.empty()) {
      out.failure = std::string(s.label) +
                    " violated logits-mean-near-zero (grand_mean=" +
                    format_double(stats.grand_mean) + ")";
    }
    if (s.label == schemes.front().label) {
      out.summary = "runs=" + std::to_string(runs) +
                    " grand_mean=" + format_double(stats.grand_mean) +
                    " std_error=" + format_double(stats.std_error);
    }
  }
  return out;
}

// ---- logit-descent --------------------------------------------------

RunOutcome run_logit_descent(const ExperimentConfig& cfg) {
  const std::size_t k = cfg.k ? cfg.k : 10;
  const std::size_t steps = cfg.steps ? cfg.steps : 10000;
  Rng rng(derive_seed(cfg.seed, 0));
  const Vec z0 = random_logits(rng, k, 2.0);
  const Vec z_t = random_logits(rng, k, 2.0);
  Vec y(k, 0.0);
  y[rng.next_u64() % k] = 1.0;
  const double kd_temperature = 4.0;

  struct Field {
    const char* name;
    LogitGradFn fn;
    bool preserves_mean;
  };
  const std::vector<Field> fields = {
      {"kd", [&](const Vec& z) { return grad_kd_scaled(z_t, z, kd_temperature); }, true},
      {"ce", [&](const Vec& z) { return grad_ce(y, z); }, true},
      {"lm", [&](const Vec& z) { return grad_lm(z_t, z); }, false},
  };

  RunOutcome out;
  out.table.columns = {"field", "step", "mean", "drift"};
  const std::size_t stride = std::max<std::size_t>(1, steps / 100);
  for (const auto& f : fields) {
    const auto records = direct_logit_descent(z0, f.fn, steps, cfg.lr);
    const double mean0 = records.front().logits_mean_s;
    for (const auto& rec : records) {
      if (rec.step_index % stride != 0 && rec.step_index != steps) continue;
      out.table.add_row({std::string(f.name),
                         static_cast<std::int64_t>(rec.step_index),
                         rec.logits_mean_s,
                         std::fabs(rec.logits_mean_s - mean0)});
    }
    const double final_drift =
        std::fabs(records.back().logits_mean_s - mean0);
    if (f.preserves_mean && final_drift > 1e-10 && out.failure.empty()) {
      out.failure = std::string(f.name) +
                    " violated mean-preservation<=1e-10 (drift=" +
                    format_double(final_drift) + ")";
    }
    if (f.name == std::string("kd")) {
      out.summary = "steps=" + std::to_string(steps) +
                    " kd_drift=" + format_double(final_drift);
    }
  }
  return out;
}

// ---- train-compare --------------------------------------------------

RunOutcome run_train_compare(const ExperimentConfig& cfg) {
  const std::size_t k = cfg.k ? cfg.k : 5;
  const std::size_t steps = cfg.steps ? cfg.steps : 200;
  std::vector<std::size_t> dims = cfg.layer_dims;
  if (dims.empty()) dims = {8, 16, k};

  const SyntheticDataset ds =
      generate_dataset(k, dims.front(), 20, 1.0, derive_seed(cfg.seed, 10));
  MlpModel teacher = init_model(
      {dims.front(), 24, k},
      {InitScheme::Kind::UniformSymmetric, InitScheme::ScaleRule::FanAvg,
       derive_seed(cfg.seed, 11)});
  train_ce(teacher, ds.samples, 50, 0.5);
  const MlpModel student = init_model(
      dims, {InitScheme::Kind::UniformSymmetric, InitScheme::ScaleRule::FanAvg,
             derive_seed(cfg.seed, 12)});

  RunOutcome out;
  out.table.columns = {"T",          "step",          "logits_mean_s",
                       "logits_mean_t", "param_distance", "grad_gap"};
  std::string first_gap;
  for (double t : cfg.t_grid) {
    const auto records = train_compare(teacher, student, ds.samples, t, steps,
                                       cfg.lr);
    for (const auto& rec : records) {
      out.table.add_row({t, static_cast<std::int64_t>(rec.step_index),
                         rec.logits_mean_s, rec.logits_mean_t,
                         rec.param_distance, rec.grad_gap});
    }
    if (first_gap.empty()) {
      first_gap = "grad_gap0(T=" + format_double(t) +
                  ")=" + format_double(records.front().grad_gap);
    }
  }
  out.summary = "steps=" + std::to_string(steps) + " " + first_gap;
  return out;
}

}  // namespace

std::size_t worker_count() {
  const char* env = std::getenv(kWorkersEnvVar);
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<std::size_t>(v);
}

int run_experiment(const ExperimentConfig& cfg) {
  const std::size_t workers = worker_count();
  RunOutcome out;
  try {
    switch (cfg.command) {
      case Command::GradCheck:
        out = run_gradcheck(cfg, workers);
        break;
      case Command::Sweep:
        out = run_sweep(cfg, workers);
        break;
      case Command::InitStats:
        out = run_init_stats(cfg, workers);
        break;
      case Command::LogitDescent:
        out = run_logit_descent(cfg);
        break;
      case Command::TrainCompare:
        out = run_train_compare(cfg);
        break;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::remove(cfg.resolved_output_path().c_str());
    return 1;
  }

  write_report(out.table, cfg.resolved_output_path(), cfg.format);
  std::printf("%s seed=%llu %s -> %s\n", command_name(cfg.command),
              static_cast<unsigned long long>(cfg.seed), out.summary.c_str(),
              cfg.resolved_output_path().c_str());
  if (!out.failure.empty()) {
    std::fprintf(stderr, "invariant failure: %s\n", out.failure.c_str());
    return 1;
  }
  return 0;
}

}  // namespace distill

// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "distill/dataset.hpp"
#include "distill/equivalence.hpp"
#include "distill/runner.hpp"

using namespace distill;

namespace {

int g_failures = 0;

void report(const char* id, const char* what, bool pass,
            const std::string& detail = "") {
  std::printf("%s (%s): %s%s%s\n", id, what, pass ? "PASS" : "FAIL",
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

Vec random_logits(Rng& rng, std::size_t k, double amp) {
  Vec z(k);
  for (double& v : z) v = rng.uniform(-amp, amp);
  return z;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// A1: |sum grad_kd_scaled| <= 1e-12 over 10,000 random instances,
// K in {2,3,10,100,1000}, T in [0.1, 1e6], in under 10 s.
void a1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::size_t> ks = {2, 3, 10, 100, 1000};
  Rng rng(0xA1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = ks[i % ks.size()];
    const Vec z_t = random_logits(rng, k, 5.0);
    const Vec z_s = random_logits(rng, k, 5.0);
    const double t = std::pow(10.0, rng.uniform(-1.0, 6.0));
    worst = std::max(worst, check_zero_sum(z_t, z_s, t));
  }
  const double elapsed = seconds_since(t0);
  report("A1", "KD gradient zero-sum", worst <= 1e-12 && elapsed < 10.0,
         "worst=" + format_double(worst) +
             " elapsed=" + format_double(elapsed) + "s");
}

// A2: same protocol for grad_ce with one-hot and soft labels.
void a2() {
  const std::vector<std::size_t> ks = {2, 3, 10, 100, 1000};
  Rng rng(0xA2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = ks[i % ks.size()];
    const Vec z = random_logits(rng, k, 5.0);
    Vec y(k, 0.0);
    if (i % 2 == 0) {
      y[rng.next_u64() % k] = 1.0;
    } else {
      double s = 0.0;
      for (double& v : y) s += (v = rng.uniform());
      for (double& v : y) v /= s;
    }
    worst = std::max(worst, check_zero_sum_ce(y, z));
  }
  report("A2", "CE gradient zero-sum", worst <= 1e-12,
         "worst=" + format_double(worst));
}

// A3: every analytic gradient matches central finite differences
// (h = 1e-5) with max relative error <= 1e-6 over 1000 instances per loss.
void a3() {
  Rng rng(0xA3);
  const std::vector<std::size_t> ks = {2, 3, 10, 100};
  const FdConfig fd{1e-5};
  double worst_lm = 0.0, worst_kd = 0.0, worst_ce = 0.0, worst_reg = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = ks[i % ks.size()];
    const Vec z_t = random_logits(rng, k, 5.0);
    const Vec z_s = random_logits(rng, k, 5.0);

    worst_lm = std::max(
        worst_lm,
        max_rel_err(grad_lm(z_t, z_s),
                    fd_gradient([&](const Vec& z) { return lm_loss(z_t, z); },
                                z_s, fd)));

    const double t = rng.uniform(0.5, 4.0);
    worst_kd = std::max(
        worst_kd,
        max_rel_err(grad_kd_scaled(z_t, z_s, t),
                    fd_gradient(
                        [&](const Vec& z) { return t * t * kd_loss(z_t, z, t); },
                        z_s, fd)));

    Vec y(k, 0.0);
    y[rng.next_u64() % k] = 1.0;
    worst_ce = std::max(
        worst_ce,
        max_rel_err(grad_ce(y, z_s),
                    fd_gradient([&](const Vec& z) { return ce_loss(y, z); },
                                z_s, fd)));

    const MeanOffsets off{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const int sign = (i % 2 == 0) ? 1 : -1;
    worst_reg = std::max(
        worst_reg,
        max_rel_err(grad_lm_reg(z_t, z_s, off, sign),
                    fd_gradient(
                        [&](const Vec& z) {
                          return lm_reg_loss(z_t, z, off, sign);
                        },
                        z_s, fd)));
  }
  const double worst =
      std::max({worst_lm, worst_kd, worst_ce, worst_reg});
  report("A3", "analytic gradients vs FD oracle", worst <= 1e-6,
         "lm=" + format_double(worst_lm) + " kd=" + format_double(worst_kd) +
             " ce=" + format_double(worst_ce) +
             " lm-reg=" + format_double(worst_reg));
}

// A4: sweeps on 100 instances with c_s != c_t: the mean-centered candidate
// converges at rate ~ -1 with error(1e6) under threshold; the printed
// plus-sign candidate plateaus at 2|c_s - c_t|/K with rate ~ 0.
void a4() {
  Rng rng(0xA4);
  const std::vector<double> grid = {1e2, 1e3, 1e4, 1e5, 1e6};
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 100 && pass; ++i) {
    const std::size_t k = 3 + rng.next_u64() % 14;
    const Vec z_t = random_logits(rng, k, 4.0);
    Vec z_s = random_logits(rng, k, 4.0);
    const double shift = (1.0 + rng.uniform()) * (i % 2 == 0 ? 1.0 : -1.0);
    for (double& v : z_s) v += shift;  // guarantee a mean gap >= 1

    const double amp = std::max(max_abs(z_t), max_abs(z_s));
    const double threshold = 1e-5 * std::max(1.0, amp * amp);

    const SweepResult mc =
        temperature_sweep(z_t, z_s, grid, LimitCandidate::MeanCentered);
    if (mc.degenerate || mc.fitted_rate < -1.2 || mc.fitted_rate > -0.8 ||
        mc.errors.back() > threshold) {
      pass = false;
      detail = "mean-centered instance " + std::to_string(i) +
               " rate=" + format_double(mc.fitted_rate) +
               " err@Tmax=" + format_double(mc.errors.back());
      break;
    }

    const double plateau =
        2.0 * std::fabs(mean(z_s) - mean(z_t)) / static_cast<double>(k);
    const SweepResult pp =
        temperature_sweep(z_t, z_s, grid, LimitCandidate::PrintedPlusSign);
    if (pp.degenerate || pp.fitted_rate < -0.1 || pp.fitted_rate > 0.1 ||
        std::fabs(pp.errors.back() - plateau) > 0.1 * plateau) {
      pass = false;
      detail = "printed-plus-sign instance " + std::to_string(i) +
               " rate=" + format_double(pp.fitted_rate) +
               " err@Tmax=" + format_double(pp.errors.back()) +
               " plateau=" + format_double(plateau);
    }
  }
  report("A4", "temperature-limit resolution of the printed sign", pass,
         detail);
}

// A5: equal-mean instances: grad_kd_scaled at T=1e6 matches grad_lm and
// the report says EXACT_EQUIVALENT.
void a5() {
  Rng rng(0xA5);
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 100 && pass; ++i) {
    const std::size_t k = 2 + rng.next_u64() % 30;
    Vec z_t = random_logits(rng, k, 4.0);
    Vec z_s = random_logits(rng, k, 4.0);
    const double ct = mean(z_t), cs = mean(z_s);
    for (double& v : z_t) v -= ct;
    for (double& v : z_s) v -= cs;

    const double amp = std::max(max_abs(z_t), max_abs(z_s));
    const double threshold = 1e-5 * std::max(1.0, amp * amp);
    const double gap =
        max_abs_diff(grad_kd_scaled(z_t, z_s, 1e6), grad_lm(z_t, z_s));
    const EquivalenceReport rep = equivalence_report(z_t, z_s, 1e6);
    if (gap > threshold || rep.verdict != Verdict::ExactEquivalent) {
      pass = false;
      detail = "instance " + std::to_string(i) + " gap=" + format_double(gap);
    }
  }
  report("A5", "equal-mean equivalence of KD and LM gradients", pass, detail);
}

// A6: init-stats analogue of the logits-mean table: 1000 seeds, 3-layer
// MLP with K=100, |grand_mean| <= 4*std_error and within 0.05 of zero,
// in under 60 s.
void a6() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::size_t> dims = {16, 32, 32, 100};
  const SyntheticDataset probe_src = generate_dataset(8, 16, 8, 1.0, 0xA6);
  std::vector<Vec> probe;
  for (const auto& s : probe_src.samples) probe.push_back(s.input);

  bool pass = true;
  std::string detail;
  for (auto kind :
       {InitScheme::Kind::UniformSymmetric, InitScheme::Kind::Normal}) {
    for (auto rule : {InitScheme::ScaleRule::FanAvg, InitScheme::ScaleRule::FanIn}) {
      const InitScheme scheme{kind, rule, 0xA6};
      const LogitMeanStats stats =
          logit_mean_statistics(dims, scheme, 1000, probe, worker_count());
      const bool ok = std::fabs(stats.grand_mean) <= 4.0 * stats.std_error &&
                      std::fabs(stats.grand_mean) <= 0.05;
      if (!ok) pass = false;
      detail += scheme.id() + ": mean=" + format_double(stats.grand_mean) +
                " se=" + format_double(stats.std_error) + "; ";
    }
  }
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 60.0;
  report("A6", "zero-mean init gives near-zero logit means", pass,
         detail + "elapsed=" + format_double(elapsed) + "s");
}

// A7: mean preservation under direct logit descent, 1e4 steps, lr = 0.1.
void a7() {
  Rng rng(0xA7);
  const std::size_t k = 10;
  const Vec z0 = random_logits(rng, k, 2.0);
  const Vec z_t = random_logits(rng, k, 2.0);
  Vec y(k, 0.0);
  y[rng.next_u64() % k] = 1.0;

  const auto kd = direct_logit_descent(
      z0, [&](const Vec& z) { return grad_kd_scaled(z_t, z, 4.0); }, 10000, 0.1);
  const double kd_drift =
      std::fabs(kd.back().logits_mean_s - kd.front().logits_mean_s);

  const auto ce = direct_logit_descent(
      z0, [&](const Vec& z) { return grad_ce(y, z); }, 10000, 0.1);
  const double ce_drift =
      std::fabs(ce.back().logits_mean_s - ce.front().logits_mean_s);

  report("A7", "mean preservation under zero-sum descent",
         kd_drift <= 1e-10 && ce_drift <= 1e-10,
         "kd_drift=" + format_double(kd_drift) +
             " ce_drift=" + format_double(ce_drift));
}

// A8: trajectory equivalence: step-0 grad-gap ratio between T=1e5 and
// T=1e4 in [0.05, 0.2]; after 200 steps, parameter distance at T=1e6 at
// least 10x below T=2.
void a8() {
  const SyntheticDataset ds = generate_dataset(5, 8, 20, 1.0, 0xA8);
  MlpModel teacher = init_model(
      {8, 24, 5}, {InitScheme::Kind::UniformSymmetric,
                   InitScheme::ScaleRule::FanAvg, derive_seed(0xA8, 1)});
  train_ce(teacher, ds.samples, 50, 0.5);
  const MlpModel student = init_model(
      {8, 16, 5}, {InitScheme::Kind::UniformSymmetric,
                   InitScheme::ScaleRule::FanAvg, derive_seed(0xA8, 2)});

  const auto t4 = train_compare(teacher, student, ds.samples, 1e4, 1, 0.1);
  const auto t5 = train_compare(teacher, student, ds.samples, 1e5, 1, 0.1);
  const double ratio = t5.front().grad_gap / t4.front().grad_gap;

  const auto high = train_compare(teacher, student, ds.samples, 1e6, 200, 0.1);
  const auto low = train_compare(teacher, student, ds.samples, 2.0, 200, 0.1);
  const double dist_high = high.back().param_distance;
  const double dist_low = low.back().param_distance;

  report("A8", "trajectory equivalence at high temperature",
         ratio >= 0.05 && ratio <= 0.2 && dist_high * 10.0 <= dist_low,
         "gap_ratio=" + format_double(ratio) +
             " dist@T=1e6=" + format_double(dist_high) +
             " dist@T=2=" + format_double(dist_low));
}

// A9: Jensen lower bound on 1000 zero-mean vectors with margin >= ln K,
// plus the documented non-zero-mean counterexample.
void a9() {
  Rng rng(0xA9);
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 1000 && pass; ++i) {
    const std::size_t k = 2 + rng.next_u64() % 99;
    Vec z = random_logits(rng, k, 5.0);
    const double c = mean(z);
    for (double& v : z) v -= c;
    Vec y(k, 0.0);
    y[rng.next_u64() % k] = 1.0;
    const double margin = ce_loss(y, z) - ce_lower_bound(y, z);
    if (margin < std::log(static_cast<double>(k)) - 1e-12) {
      pass = false;
      detail = "margin=" + format_double(margin) + " at K=" + std::to_string(k);
    }
  }
  // counterexample: z = (10, 10) violates the bound off the zero-mean case
  const bool violated =
      ce_lower_bound({1.0, 0.0}, {10.0, 10.0}) > ce_loss({1.0, 0.0}, {10.0, 10.0});
  report("A9", "Jensen bound under the zero-mean condition", pass && violated,
         detail);
}

// A10: byte-identical reports for repeated runs, sequential and parallel.
void a10() {
  bool pass = true;
  std::string detail;
  const std::vector<std::vector<std::string>> cases = {
      {"gradcheck", "--runs", "3", "--k", "5", "--out", "a10_gradcheck.csv"},
      {"sweep", "--runs", "4", "--k", "6", "--out", "a10_sweep.csv"},
      {"init-stats", "--runs", "60", "--k", "6", "--layers", "5,8,6", "--out",
       "a10_init.csv"},
  };
  for (const auto& args : cases) {
    const ExperimentConfig cfg = load_config(args);
    const std::string path = cfg.resolved_output_path();
    unsetenv(kWorkersEnvVar);
    if (run_experiment(cfg) != 0) {
      pass = false;
      detail = args[0] + " failed";
      break;
    }
    const std::string first = slurp(path);
    if (run_experiment(cfg) != 0 || slurp(path) != first) {
      pass = false;
      detail = args[0] + " not deterministic sequentially";
      break;
    }
    setenv(kWorkersEnvVar, "4", 1);
    const int rc = run_experiment(cfg);
    unsetenv(kWorkersEnvVar);
    if (rc != 0 || slurp(path) != first) {
      pass = false;
      detail = args[0] + " differs under parallel workers";
      break;
    }
    std::remove(path.c_str());
  }
  report("A10", "deterministic reports across worker counts", pass, detail);
}

}  // namespace

int main() {
  a1();
  a2();
  a3();
  a4();
  a5();
  a6();
  a7();
  a8();
  a9();
  a10();
  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}

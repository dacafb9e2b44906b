// distill-equiv: experiment CLI. See README for the command reference.

#include <cstdio>
#include <string>
#include <vector>

#include "distill/runner.hpp"

namespace {

const char* kUsage = R"(usage: distill-equiv <command> [options]

commands:
  gradcheck      analytic gradients vs the finite-difference oracle
  sweep          temperature sweep of the scaled KD gradient against the
                 three candidate limit forms, with log-log rate fits
  init-stats     logits-mean statistics over many zero-mean initializations
  logit-descent  gradient descent directly on logits; tracks mean drift
  train-compare  two students trained with the KD gradient vs its
                 infinite-temperature limit; tracks parameter divergence

options:
  --config PATH      flat key = value file mirroring the flags below
  --k N              class count
  --seed N           base seed (default 1)
  --t-grid a,b,c     ascending temperatures (default 1e2,1e3,1e4,1e5,1e6)
  --runs N           instances / runs
  --steps N          descent / training steps
  --lr X             learning rate (default 0.1)
  --layers d0,d1,..  MLP dimensions, last must equal k
  --tol X            equal-mean tolerance (default 1e-9)
  --reg-sign {+1,-1} sign of the mean-offset regularizer (default -1)
  --out PATH         report path (default <command>.<format>)
  --format {csv,json}

Set DISTILL_WORKERS to parallelize; outputs are identical either way.
)";

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    std::fputs(kUsage, args.empty() ? stderr : stdout);
    return args.empty() ? 2 : 0;
  }
  try {
    const distill::ExperimentConfig cfg = distill::load_config(args);
    return distill::run_experiment(cfg);
  } catch (const distill::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

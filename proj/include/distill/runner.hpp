#pragma once

// Experiment dispatch: runs the configured experiment, writes its report
// file, prints a one-line summary to stdout. Exit status 0 on success,
// 1 if any module-level invariant assertion fails (the failing invariant
// is named in the report and on stderr), 2 on configuration errors.

#include "distill/config.hpp"

namespace distill {

// Worker count for parallelizable loops; absent or unparsable means
// sequential. Results are merged in seed order, so worker count never
// changes the output bytes.
inline constexpr const char* kWorkersEnvVar = "DISTILL_WORKERS";

std::size_t worker_count();

int run_experiment(const ExperimentConfig& cfg);

}  // namespace distill

#pragma once

// Experiment configuration: CLI flags, optional flat key=value config
// file (flags win), validated ranges, documented defaults.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "distill/report.hpp"

namespace distill {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { GradCheck, Sweep, InitStats, LogitDescent, TrainCompare };

const char* command_name(Command c);

struct ExperimentConfig {
  Command command = Command::GradCheck;
  std::uint64_t seed = 1;
  std::size_t k = 0;  // 0 = command-specific default
  std::vector<double> t_grid = {1e2, 1e3, 1e4, 1e5, 1e6};
  std::size_t runs = 0;   // 0 = command-specific default
  std::size_t steps = 0;  // 0 = command-specific default
  double lr = 0.1;
  std::vector<std::size_t> layer_dims;  // empty = command-specific default
  double tol = 1e-9;
  int reg_sign = -1;
  std::string output_path;  // empty = "<command>.<format>"
  ReportFormat format = ReportFormat::Csv;

  std::string resolved_output_path() const;
};

// Parses a flat "key = value" document mirroring the flag names
// (k, seed, t-grid, runs, steps, lr, layers, tol, reg-sign, out, format).
// Throws ConfigError with a line diagnostic on malformed input.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// args = {command, flag, value, ...} (argv without the program name).
// Flag values override config-file values. Throws ConfigError naming the
// violated invariant on any out-of-range field.
ExperimentConfig load_config(const std::vector<std::string>& args);

}  // namespace distill

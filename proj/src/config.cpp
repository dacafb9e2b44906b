#include "distill/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace distill {

namespace {

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> table = {
      {"gradcheck", Command::GradCheck},
      {"sweep", Command::Sweep},
      {"init-stats", Command::InitStats},
      {"logit-descent", Command::LogitDescent},
      {"train-compare", Command::TrainCompare},
  };
  return table;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(d)) {
    throw ConfigError(key + ": not a finite number: '" + v + "'");
  }
  return d;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    std::uint64_t r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
  }
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void apply_field(ExperimentConfig& cfg, const std::string& key,
                 const std::string& value) {
  if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "k") {
    cfg.k = static_cast<std::size_t>(parse_u64(key, value));
    if (cfg.k < 2) throw ConfigError("k: class count must be >= 2");
  } else if (key == "t-grid") {
    cfg.t_grid.clear();
    for (const auto& s : split_commas(value)) {
      cfg.t_grid.push_back(parse_double(key, s));
    }
  } else if (key == "runs") {
    cfg.runs = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "steps") {
    cfg.steps = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "lr") {
    cfg.lr = parse_double(key, value);
  } else if (key == "layers") {
    cfg.layer_dims.clear();
    for (const auto& s : split_commas(value)) {
      const std::uint64_t d = parse_u64(key, s);
      if (d == 0) throw ConfigError("layers: dimensions must be positive");
      cfg.layer_dims.push_back(static_cast<std::size_t>(d));
    }
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "reg-sign") {
    if (value == "+1" || value == "1") {
      cfg.reg_sign = 1;
    } else if (value == "-1") {
      cfg.reg_sign = -1;
    } else {
      throw ConfigError("reg-sign: must be +1 or -1, got '" + value + "'");
    }
  } else if (key == "out") {
    cfg.output_path = value;
  } else if (key == "format") {
    try {
      cfg.format = parse_format(value);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("unknown option: " + key);
  }
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.t_grid.empty()) throw ConfigError("t-grid: must not be empty");
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
    if (!(cfg.t_grid[i] > 0)) {
      throw ConfigError("t-grid: temperatures must be positive");
    }
    if (i > 0 && !(cfg.t_grid[i] > cfg.t_grid[i - 1])) {
      throw ConfigError("t-grid: must be strictly ascending");
    }
  }
  if (!(cfg.lr > 0) || !std::isfinite(cfg.lr)) {
    throw ConfigError("lr: must be finite and positive");
  }
  if (!(cfg.tol > 0) || !std::isfinite(cfg.tol)) {
    throw ConfigError("tol: must be finite and positive");
  }
  if (!cfg.layer_dims.empty()) {
    if (cfg.layer_dims.size() < 2) {
      throw ConfigError("layers: need at least input and output dims");
    }
    if (cfg.k != 0 && cfg.layer_dims.back() != cfg.k) {
      throw ConfigError("layers: last dimension must equal k");
    }
  }
}

}  // namespace

const char* command_name(Command c) {
  for (const auto& [name, cmd] : command_table()) {
    if (cmd == c) return name.c_str();
  }
  return "?";
}

std::string ExperimentConfig::resolved_output_path() const {
  if (!output_path.empty()) return output_path;
  return std::string(command_name(command)) + format_extension(format);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

ExperimentConfig load_config(const std::vector<std::string>& args) {
  if (args.empty()) {
    throw ConfigError(
        "missing command (gradcheck | sweep | init-stats | logit-descent | "
        "train-compare)");
  }
  const auto it = command_table().find(args[0]);
  if (it == command_table().end()) {
    throw ConfigError("unknown command: " + args[0]);
  }

  // First pass: pull out --config so file values can be applied before
  // the remaining flags override them.
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> flags;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      throw ConfigError("expected a --flag, got '" + a + "'");
    }
    if (i + 1 >= args.size()) {
      throw ConfigError(a + ": missing value");
    }
    const std::string key = a.substr(2);
    const std::string value = args[++i];
    if (key == "config") {
      config_path = value;
    } else {
      flags.emplace_back(key, value);
    }
  }

  ExperimentConfig cfg;
  cfg.command = it->second;
  if (!config_path.empty()) {
    for (const auto& [k, v] : parse_config_file(config_path)) {
      apply_field(cfg, k, v);
    }
  }
  for (const auto& [k, v] : flags) {
    apply_field(cfg, k, v);
  }
  validate(cfg);
  return cfg;
}

}  // namespace distill

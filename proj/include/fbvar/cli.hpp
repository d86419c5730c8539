#pragma once

#include "fbvar/gibbs.hpp"
#include "fbvar/synthetic.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fbvar {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitIo = 4,
  kExitInterrupted = 130,
};

/// Everything one invocation needs. Relative paths resolve against the
/// directory of the config file.
struct RunConfig {
  std::vector<std::string> data;
  std::string schema;
  std::string scheme = "default";
  std::optional<std::string> sample_start, sample_end;
  bool standardize = true;
  ModelSpec model;
  std::string output = "run";
  int horizon = 24;
  std::vector<double> quantiles{0.05, 0.16, 0.5, 0.84, 0.95};
  TruthSpec simulate;
  std::uint64_t simulate_seed = 1;
};

/// Reads a config; missing keys take their defaults. Unknown keys are an error.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
/// Fully explicit form (every default materialised), loadable by parse_config.
nlohmann::json config_to_json(const RunConfig& config);

/// Seed of chain k in a multi-chain run; chain 0 keeps the base seed.
std::uint64_t chain_seed(std::uint64_t base, int chain);

/// Entry point of the fbvar tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbvar

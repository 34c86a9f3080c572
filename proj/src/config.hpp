#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levycouple {

// Flat key set shared by config files (key = value per line, '#' comments)
// and command-line flags; later settings override earlier ones.
struct ExperimentConfig {
  std::string model = "exp-stable(0.1,0.03)";
  std::optional<double> eps1;  // with eps2, shorthand for exp-stable(eps1, eps2)
  std::optional<double> eps2;
  std::size_t k = 128;
  std::vector<std::size_t> ks;  // hierarchy; empty means {k}
  int q = 12;
  std::size_t reps = 1000;
  std::size_t endpoint_samples = 30000;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  unsigned threads = 0;

  // mlmc-bench
  std::string base = "stable-base";
  std::string functional = "supremum";
  int level_min = 0;
  int level_max = 6;
  std::size_t level_samples = 4000;
  double p = 1.5;
  std::vector<double> deltas{0.02, 0.01};

  // limit-regime
  int n_min = 1;
  int n_max = 8;
};

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig cfg = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig cfg = {});

// Throws ConfigError on missing seed, unknown presets and out-of-range values.
void validate(const ExperimentConfig& cfg);

// The effective model string (eps1/eps2 shorthand applied).
std::string effective_model(const ExperimentConfig& cfg);
std::vector<std::size_t> effective_ks(const ExperimentConfig& cfg);

// Single line "key=value key=value ..." in a fixed key order.
std::string config_echo(const ExperimentConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace levycouple

#pragma once

// Sweep configuration: JSON file plus flag overrides, precedence
// flags > file > defaults. Parsing is strict: unknown keys are errors, so a
// config can never smuggle in settings the tool would silently ignore.

#include <optional>
#include <string>
#include <vector>

#include "cgeq/states.hpp"
#include "cgeq/types.hpp"

namespace cgeq {

struct DirectionSpec {
  std::string label;  // canonical token: z, x, y, or angles_<theta>_<phi> (degrees)
  Direction<double> axis;
};

struct SweepConfig {
  double J = 1;
  double Jy = 1.4;
  double Jz = 0.5;
  double hz = 0.01;
  int n_min = 2;
  int n_max = 12;
  int k_min = 0;
  int k_max = 3;
  std::vector<FlipCase> cases = {FlipCase::exact, FlipCase::at_most};
  std::vector<DirectionSpec> directions;
  double time_start = 0;
  double time_end = 50;
  int time_samples = 2000;
  double decay_threshold = 0.1;
  double gap_tolerance = 1e-10;
  std::string out_dir = ".";
  Index dim_cap = default_dim_cap;
  int threads = 1;

  SweepConfig();  // fills directions with the z axis
};

struct ConfigIssue {
  std::string field;
  std::string message;
};

struct ConfigResult {
  SweepConfig config;
  std::vector<ConfigIssue> errors;
  std::vector<ConfigIssue> warnings;
  bool ok() const { return errors.empty(); }
};

// Flag-level overrides, applied after the file.
struct ConfigOverrides {
  std::optional<int> n_max;
  std::optional<int> k_max;
  std::optional<std::string> cases;
  std::optional<std::string> direction;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<Index> dim_cap;
};

std::string case_label(FlipCase fc);  // "a" or "b"

bool parse_direction(const std::string& text, DirectionSpec& out, std::string& error);
bool parse_cases(const std::string& text, std::vector<FlipCase>& out, std::string& error);

ConfigResult parse_config_text(const std::string& json_text);
ConfigResult load_config_file(const std::string& path);
void apply_overrides(ConfigResult& result, const ConfigOverrides& overrides);

// Re-checks every invariant; appends to errors/warnings.
void validate_config(ConfigResult& result);

// Human-readable dump of the effective settings, one "key = value" per line.
std::string describe_config(const SweepConfig& config);

}  // namespace cgeq

#include "cgeq/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "cgeq/csv.hpp"

namespace cgeq {

SweepConfig::SweepConfig() { directions.push_back({"z", Direction<double>::z()}); }

std::string case_label(FlipCase fc) { return fc == FlipCase::exact ? "a" : "b"; }

namespace {

bool parse_double_token(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last && std::isfinite(out);
}

}  // namespace

bool parse_direction(const std::string& text, DirectionSpec& out, std::string& error) {
  if (text == "z") {
    out = {"z", Direction<double>::z()};
    return true;
  }
  if (text == "x") {
    out = {"x", Direction<double>::x()};
    return true;
  }
  if (text == "y") {
    out = {"y", Direction<double>::y()};
    return true;
  }
  const std::string prefix = "angles:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string body = text.substr(prefix.size());
    const auto comma = body.find(',');
    double theta_deg = 0, phi_deg = 0;
    if (comma == std::string::npos || !parse_double_token(body.substr(0, comma), theta_deg) ||
        !parse_double_token(body.substr(comma + 1), phi_deg)) {
      error = "expected angles:<theta_deg>,<phi_deg>, got \"" + text + "\"";
      return false;
    }
    const double to_rad = std::numbers::pi / 180.0;
    out.label = "angles_" + format_number(theta_deg) + "_" + format_number(phi_deg);
    out.axis = Direction<double>{theta_deg * to_rad, phi_deg * to_rad};
    return true;
  }
  error = "unknown direction \"" + text + "\" (want z, x, y, or angles:<theta_deg>,<phi_deg>)";
  return false;
}

bool parse_cases(const std::string& text, std::vector<FlipCase>& out, std::string& error) {
  if (text == "a") {
    out = {FlipCase::exact};
    return true;
  }
  if (text == "b") {
    out = {FlipCase::at_most};
    return true;
  }
  if (text == "both") {
    out = {FlipCase::exact, FlipCase::at_most};
    return true;
  }
  error = "unknown case \"" + text + "\" (want a, b, or both)";
  return false;
}

namespace {

using nlohmann::json;

void read_json_into(const json& doc, ConfigResult& result) {
  SweepConfig& config = result.config;
  const auto fail = [&result](const std::string& field, const std::string& message) {
    result.errors.push_back({field, message});
  };

  for (const auto& [key, value] : doc.items()) {
    const auto number = [&](double& slot) {
      if (value.is_number())
        slot = value.get<double>();
      else
        fail(key, "expected a number");
    };
    const auto integer = [&](int& slot) {
      if (value.is_number_integer())
        slot = value.get<int>();
      else
        fail(key, "expected an integer");
    };

    if (key == "J") number(config.J);
    else if (key == "Jy") number(config.Jy);
    else if (key == "Jz") number(config.Jz);
    else if (key == "hz") number(config.hz);
    else if (key == "n_min") integer(config.n_min);
    else if (key == "n_max") integer(config.n_max);
    else if (key == "k_min") integer(config.k_min);
    else if (key == "k_max") integer(config.k_max);
    else if (key == "time_start") number(config.time_start);
    else if (key == "time_end") number(config.time_end);
    else if (key == "time_samples") integer(config.time_samples);
    else if (key == "decay_threshold") number(config.decay_threshold);
    else if (key == "gap_tolerance") number(config.gap_tolerance);
    else if (key == "out_dir") {
      if (value.is_string())
        config.out_dir = value.get<std::string>();
      else
        fail(key, "expected a string");
    } else if (key == "dim_cap") {
      if (value.is_number_integer())
        config.dim_cap = value.get<std::int64_t>();
      else
        fail(key, "expected an integer");
    } else if (key == "threads") integer(config.threads);
    else if (key == "cases") {
      std::string error;
      if (!value.is_string() || !parse_cases(value.get<std::string>(), config.cases, error))
        fail(key, error.empty() ? "expected a string" : error);
    } else if (key == "directions") {
      if (!value.is_array() || value.empty()) {
        fail(key, "expected a non-empty array of direction strings");
        continue;
      }
      std::vector<DirectionSpec> parsed;
      for (const auto& item : value) {
        DirectionSpec dir;
        std::string error;
        if (!item.is_string() || !parse_direction(item.get<std::string>(), dir, error)) {
          fail(key, error.empty() ? "expected direction strings" : error);
          parsed.clear();
          break;
        }
        parsed.push_back(dir);
      }
      if (!parsed.empty()) config.directions = parsed;
    } else {
      fail(key, "unknown key");
    }
  }
}

}  // namespace

void validate_config(ConfigResult& result) {
  const SweepConfig& c = result.config;
  const auto fail = [&result](const std::string& field, const std::string& message) {
    result.errors.push_back({field, message});
  };
  const auto warn = [&result](const std::string& field, const std::string& message) {
    result.warnings.push_back({field, message});
  };

  if (!std::isfinite(c.J)) fail("J", "must be finite");
  if (!(c.Jy >= 0) || !std::isfinite(c.Jy)) fail("Jy", "must be >= 0 and finite");
  if (!(c.Jz >= 0) || !std::isfinite(c.Jz)) fail("Jz", "must be >= 0 and finite");
  if (!(c.hz >= 0) || !std::isfinite(c.hz)) fail("hz", "must be >= 0 and finite");

  if (c.n_min < 1) fail("n_min", "must be >= 1");
  if (c.n_max < c.n_min) fail("n_max", "must be >= n_min");
  if (c.dim_cap < 2) fail("dim_cap", "must be >= 2");
  if (c.n_max >= 1 && (c.n_max >= 63 || (Index{1} << c.n_max) > c.dim_cap))
    fail("n_max", "2^n_max exceeds dim_cap " + format_number(std::int64_t{c.dim_cap}));

  if (c.k_min < 0) fail("k_min", "must be >= 0");
  if (c.k_max < c.k_min) warn("k_max", "empty flip range, sweeps will have no points");

  if (!std::isfinite(c.time_start) || !std::isfinite(c.time_end))
    fail("time_start", "time window must be finite");
  if (c.time_samples < 1) fail("time_samples", "must be >= 1");
  if (c.time_samples > 1 && !(c.time_end > c.time_start))
    fail("time_end", "must be > time_start");
  if (!(c.decay_threshold > 0 && c.decay_threshold < 1))
    fail("decay_threshold", "must lie in (0, 1)");
  if (!(c.gap_tolerance > 0)) fail("gap_tolerance", "must be > 0");
  if (c.threads < 1) fail("threads", "must be >= 1");
  if (c.out_dir.empty()) fail("out_dir", "must not be empty");
  if (c.cases.empty()) fail("cases", "must not be empty");
  if (c.directions.empty()) fail("directions", "must not be empty");

  for (int k = std::max(c.k_min, 0); k <= c.k_max; ++k)
    if (2 * k + 1 > c.n_max)
      warn("k_max", "flip count " + format_number(std::int64_t{k}) +
                        " never satisfies n > 2k below n_max, filtered from scaling sweeps");
}

ConfigResult parse_config_text(const std::string& json_text) {
  ConfigResult result;
  const auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    result.errors.push_back({"<config>", "not valid JSON"});
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back({"<config>", "top level must be a JSON object"});
    return result;
  }
  read_json_into(doc, result);
  if (result.errors.empty()) validate_config(result);
  return result;
}

ConfigResult load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigResult result;
    result.errors.push_back({"<config>", "cannot read " + path});
    return result;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

void apply_overrides(ConfigResult& result, const ConfigOverrides& overrides) {
  SweepConfig& config = result.config;
  if (overrides.n_max) config.n_max = *overrides.n_max;
  if (overrides.k_max) config.k_max = *overrides.k_max;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.dim_cap) config.dim_cap = *overrides.dim_cap;
  if (overrides.cases) {
    std::string error;
    if (!parse_cases(*overrides.cases, config.cases, error))
      result.errors.push_back({"--case", error});
  }
  if (overrides.direction) {
    DirectionSpec dir;
    std::string error;
    if (parse_direction(*overrides.direction, dir, error))
      config.directions = {dir};
    else
      result.errors.push_back({"--direction", error});
  }
  if (result.errors.empty()) {
    result.warnings.clear();
    validate_config(result);
  }
}

std::string describe_config(const SweepConfig& config) {
  std::ostringstream out;
  out << "J = " << format_number(config.J) << "\n";
  out << "Jy = " << format_number(config.Jy) << "\n";
  out << "Jz = " << format_number(config.Jz) << "\n";
  out << "hz = " << format_number(config.hz) << "\n";
  out << "n = [" << config.n_min << ", " << config.n_max << "]\n";
  out << "k = [" << config.k_min << ", " << config.k_max << "]\n";
  out << "cases =";
  for (const auto fc : config.cases) out << " " << case_label(fc);
  out << "\n";
  out << "directions =";
  for (const auto& dir : config.directions) out << " " << dir.label;
  out << "\n";
  out << "time grid = " << config.time_samples << " samples over ["
      << format_number(config.time_start) << ", " << format_number(config.time_end) << "]\n";
  out << "decay_threshold = " << format_number(config.decay_threshold) << "\n";
  out << "gap_tolerance = " << format_number(config.gap_tolerance) << "\n";
  out << "out_dir = " << config.out_dir << "\n";
  out << "dim_cap = " << format_number(std::int64_t{config.dim_cap}) << "\n";
  out << "threads = " << config.threads << "\n";
  return out.str();
}

}  // namespace cgeq

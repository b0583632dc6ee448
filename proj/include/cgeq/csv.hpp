#pragma once

// Deterministic CSV output: shortest round-trip decimals, comma separators,
// LF endings regardless of platform.

#include <cstdint>
#include <string>
#include <vector>

namespace cgeq {

std::string format_number(double value);
std::string format_number(std::int64_t value);

struct CsvTable {
  std::vector<std::string> comments;  // written first, each prefixed "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

}  // namespace cgeq

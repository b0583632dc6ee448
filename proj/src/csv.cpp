#include "cgeq/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace cgeq {

std::string format_number(double value) {
  std::array<char, 32> buf;
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

std::string format_number(std::int64_t value) {
  std::array<char, 24> buf;
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);

  const auto write_joined = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.put(',');
      out.write(cells[i].data(), static_cast<std::streamsize>(cells[i].size()));
    }
    out.put('\n');
  };

  for (const auto& line : table.comments) {
    out.write("# ", 2);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.put('\n');
  }
  write_joined(table.header);
  for (const auto& row : table.rows) write_joined(row);
  if (!out) throw std::runtime_error("write_csv: failed writing " + path);
}

}  // namespace cgeq

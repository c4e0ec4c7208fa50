#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace fraclab {

/// %.17g, enough to round-trip any double.
std::string format_double(double v);

using CsvCell = std::variant<double, std::int64_t, std::string>;

/// Comma-separated file with a header row. Doubles are written with 17
/// significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
};

}  // namespace fraclab

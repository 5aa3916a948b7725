#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ssinr::harness {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  // Index of a header column; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
  std::string to_string() const;
  void write(const std::filesystem::path& path) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ssinr::harness

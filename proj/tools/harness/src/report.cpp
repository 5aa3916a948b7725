#include "ssinr/harness/report.hpp"

#include "ssinr/harness/csv.hpp"

namespace ssinr::harness {

namespace {

std::string escape_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  out += "|";
  for (const auto& c : cells) out += " " + escape_cell(c) + " |";
  out += "\n";
}

}  // namespace

std::string render_report(const std::vector<std::filesystem::path>& csv_files) {
  std::string out = "# ssinr report\n";
  for (const auto& path : csv_files) {
    const CsvTable t = read_csv(path);
    out += "\n## " + path.filename().string() + "\n\n";
    out += "Source: `" + path.string() + "`\n\n";
    append_row(out, t.header);
    out += "|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& r : t.rows) append_row(out, r);
  }
  return out;
}

}  // namespace ssinr::harness

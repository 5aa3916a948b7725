#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ssinr::harness {

// Markdown document with one section per CSV file, titled by its file name.
std::string render_report(const std::vector<std::filesystem::path>& csv_files);

}  // namespace ssinr::harness

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssinr/harness/csv.hpp"
#include "ssinr/backbones.hpp"
#include "ssinr/numerics.hpp"

namespace ssinr::harness {

struct TableOptions {
  std::vector<std::filesystem::path> images;
  bool full_scale = false;  // 256×256, width 256, 500 epochs instead of 64, 128, 300
  std::size_t seeds = 1;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> width;
  BackboneKind backbone = BackboneKind::Siren;
  Precision precision = Precision::Single;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

const std::vector<std::string>& table_ids();

// Runs every configuration the table needs over images × seeds and lays the
// averaged final PSNR/SSIM out as a table. Unknown ids raise
// ConfigError.
CsvTable run_table(const std::string& id, const TableOptions& options);

// Parameter count of the reference SIREN (in 2, out 3, width 256) with the
// given number of weight layers.
std::size_t reference_param_count(std::size_t layers);

// Image files in a directory (sorted), or the path itself when it is a file.
std::vector<std::filesystem::path> collect_images(const std::filesystem::path& path);

}  // namespace ssinr::harness

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssinr/harness/config.hpp"
#include "ssinr/harness/csv.hpp"

namespace ssinr::harness {

inline constexpr std::size_t kDefaultMaxCells = 128;

struct SweepAxis {
  std::string param;  // dotted config key, e.g. "transform.input"
  std::vector<nlohmann::json> values;
};

struct SweepSpec {
  nlohmann::json base;  // full run config document
  std::vector<SweepAxis> axes;
  std::size_t seeds_per_cell = 1;
  std::size_t max_cells = kDefaultMaxCells;

  std::size_t cell_count() const;
};

// Validates keys, axis count (1 or 2), non-empty axes and the cell cap.
SweepSpec parse_sweep_spec(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct TrialOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;
  double final_mse = 0.0;
  double final_psnr = 0.0;
  std::optional<double> final_ssim;
};

struct CellOutcome {
  std::size_t index = 0;
  std::vector<nlohmann::json> values;  // one per axis
  std::vector<TrialOutcome> trials;
};

// Config for one cell/trial; output_dir is left to the caller.
RunConfig cell_config(const SweepSpec& spec, std::size_t cell, std::size_t trial);

// Runs every cell × seed, writing per-trial artifacts under
// out_dir/cell_<i>/trial_<t>, plus trials.csv and sweep.csv.
std::vector<CellOutcome> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                                   std::size_t jobs);

// One row per cell: axis values, seeds, ok count, status, mean/std of metrics.
CsvTable sweep_table(const SweepSpec& spec, const std::vector<CellOutcome>& cells);
CsvTable trials_table(const SweepSpec& spec, const std::vector<CellOutcome>& cells);

std::string axis_value_text(const nlohmann::json& value);

}  // namespace ssinr::harness

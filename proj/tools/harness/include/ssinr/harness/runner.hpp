#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ssinr/harness/config.hpp"
#include "ssinr/harness/csv.hpp"
#include "ssinr/training.hpp"

namespace ssinr::harness {

struct FitArtifacts {
  std::filesystem::path metrics_csv;
  std::filesystem::path reconstruction;
  std::filesystem::path checkpoint;
  std::filesystem::path summary;  // run.json
  std::filesystem::path config;   // config.json, accepted by --config
};

struct FitOutcome {
  RunConfig config;  // fully resolved
  TransformSpec transform;
  SignalDataset dataset;
  FitResult result;
  std::optional<FitArtifacts> files;
};

// Loads the dataset and fits. Artifacts are written when config.output_dir is
// non-empty. With `resume`, the backbone and optimizer state come from the
// checkpoint and training continues for config.train.epochs more epochs.
FitOutcome run_fit(const RunConfig& config,
                   const std::optional<std::filesystem::path>& resume = std::nullopt);

// epoch,mse,psnr,ssim; ssim blank off-cadence; final row has epoch -1.
CsvTable metrics_table(const RunReport& report);
nlohmann::json summary_json(const FitOutcome& outcome);

}  // namespace ssinr::harness

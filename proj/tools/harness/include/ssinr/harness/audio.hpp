#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ssinr/backbones.hpp"
#include "ssinr/harness/csv.hpp"
#include "ssinr/metrics.hpp"
#include "ssinr/numerics.hpp"

namespace ssinr::harness {

struct AudioOptions {
  std::filesystem::path input;
  std::size_t trials = 10;
  std::size_t epochs = 500;
  std::size_t width = 128;
  std::size_t hidden_layers = 3;
  BackboneKind backbone = BackboneKind::Siren;
  Precision precision = Precision::Single;
  double max_seconds = 0.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct AudioTrial {
  std::uint64_t seed = 0;
  double mse = 0.0;
};

struct AudioRow {
  std::string method;  // backbone name, or "ss-" + backbone
  std::vector<AudioTrial> trials;
  TrialStats mse;
};

// Fits the clip `trials` times with the vanilla backbone and with SS (input
// scale ss-default, adaptive output shift). Trial t uses the same seed for
// both methods.
std::vector<AudioRow> run_audio(const AudioOptions& options);

// method,trials,mse_mean,mse_std
CsvTable audio_table(const std::vector<AudioRow>& rows);
// method,trial,seed,mse
CsvTable audio_trials_table(const std::vector<AudioRow>& rows);

}  // namespace ssinr::harness

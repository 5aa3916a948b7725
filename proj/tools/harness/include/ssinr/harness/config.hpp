#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ssinr/backbones.hpp"
#include "ssinr/signals.hpp"
#include "ssinr/training.hpp"
#include "ssinr/transforms.hpp"

namespace ssinr::harness {

// Everything needed to reproduce one fit. Transforms are kept as text;
// "ss-default" is resolved against the backbone at run time.
struct RunConfig {
  std::string input;
  std::optional<SignalKind> signal;  // inferred from the file extension when unset
  ChannelMode channels = ChannelMode::Rgb;
  std::optional<std::size_t> crop;
  ValueRange output_range;
  ValueRange coord_range;
  double max_seconds = 0.0;

  BackboneConfig backbone;  // in_dim/out_dim are taken from the dataset
  std::string input_transform = "identity";
  std::string output_transform = "identity";
  bool per_channel_shift = false;
  KernelParams kernel;

  TrainConfig train;
  std::string output_dir;
};

// Input scale used by "--input-transform ss-default" for each backbone.
double ss_default_scale(BackboneKind kind);

SignalKind resolve_signal_kind(const RunConfig& config);
// Parses both transform strings, resolving "ss-default".
TransformSpec resolve_transform(const RunConfig& config);
// Same config with "ss-default" replaced by the concrete scale.
RunConfig resolved(const RunConfig& config);

SignalDataset load_dataset(const RunConfig& config);
// Backbone with in/out dims matched to the dataset.
BackboneConfig dataset_backbone(const RunConfig& config, const SignalDataset& dataset);

nlohmann::json to_json(const RunConfig& config);
// Keys present in `doc` override `base`. Unknown keys and malformed values
// raise ConfigError naming the key.
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

nlohmann::json to_json(const BackboneConfig& config);
nlohmann::json to_json(const TrainConfig& config);

}  // namespace ssinr::harness

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssinr/backbones.hpp"
#include "ssinr/numerics.hpp"
#include "ssinr/signals.hpp"
#include "ssinr/transforms.hpp"

namespace ssinr {

struct TrainConfig {
  std::size_t epochs = 500;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 0;  // 0: full batch
  std::uint64_t seed = 0;
  Precision precision = Precision::Single;
  std::size_t ssim_every = 50;  // 0 disables per-epoch SSIM

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::uint64_t t = 0;

  static AdamState zeros(std::size_t n) { return {std::vector<T>(n), std::vector<T>(n), 0}; }

  template <typename U>
  AdamState<U> cast() const {
    return {std::vector<U>(m.begin(), m.end()), std::vector<U>(v.begin(), v.end()), t};
  }
  bool operator==(const AdamState&) const = default;
};

// Optimizer state and epoch counter stored in checkpoints.
struct TrainingState {
  AdamState<double> adam;
  std::size_t epochs_completed = 0;

  bool operator==(const TrainingState&) const = default;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double mse = 0.0;   // loss in training units
  double psnr = 0.0;  // on [0,1]-rescaled values
  std::optional<double> ssim;

  bool operator==(const EpochRecord&) const = default;
};

struct RunReport {
  std::vector<EpochRecord> epochs;
  double final_mse = 0.0;
  double final_psnr = 0.0;
  std::optional<double> final_ssim;
  double best_psnr = 0.0;
  std::size_t best_epoch = 0;
  double wall_seconds = 0.0;
  ShiftValues beta;  // output shift actually applied, if any

  BackboneConfig backbone;
  TransformSpec transform;
  TrainConfig train;

  // Everything except wall-clock time.
  bool same_results(const RunReport& other) const;
};

template <typename T>
struct LossResult {
  double loss = 0.0;
  Matrix<T> grad;
};

/// Mean of squared differences over every entry; grad = 2·(pred − target)/count.
template <typename T>
LossResult<T> mse_loss(const Matrix<T>& pred, const Matrix<T>& target);

/// Bias-corrected Adam update of `params` in place; increments state.t.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state,
               const TrainConfig& config);

// Applies one Adam step across every layer of the model, in flattened order.
template <typename T>
void adam_step(Mlp<T>& model, const MlpGradients<T>& grads, AdamState<T>& state,
               const TrainConfig& config);

struct FitResult {
  MlpModel model;
  RunReport report;
  TrainingState state;
  Matrix2D prediction;  // ŷ after the last update, training units
};

// Initializes a model from (backbone, train.seed) and fits it.
FitResult fit(const SignalDataset& dataset, const BackboneConfig& backbone,
              const TransformSpec& transform, const TrainConfig& train);

// Fits starting from `initial`, optionally resuming optimizer state.
FitResult fit_from(const SignalDataset& dataset, const MlpModel& initial,
                   const TransformSpec& transform, const TrainConfig& train,
                   const std::optional<TrainingState>& resume = std::nullopt);

// Inference through the full pipeline: input transform, features, forward, output transform.
Matrix2D predict(const MlpModel& model, const Matrix2D& coords, const TransformSpec& transform,
                 const ShiftValues& beta);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  MlpModel model;
  std::optional<TrainingState> training;
  std::string config_document;  // UTF-8 JSON; backbone under "backbone"
};

// `extra_config` (a JSON object, may be empty) is stored alongside the backbone.
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path,
                     const std::optional<TrainingState>& training = std::nullopt,
                     const std::string& extra_config = "");
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ssinr

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssinr/numerics.hpp"

namespace ssinr {

enum class BackboneKind { ReluPe, Siren, Finer };

std::string to_string(BackboneKind kind);
BackboneKind parse_backbone_kind(const std::string& text);

struct BackboneConfig {
  BackboneKind kind = BackboneKind::Siren;
  std::size_t hidden_layers = 3;
  std::size_t width = 256;
  std::size_t in_dim = 2;
  std::size_t out_dim = 3;
  double omega0 = 30.0;
  std::size_t pe_bands = 10;

  void validate() const;
  // Width of the first layer's input: in_dim, or 2·L·in_dim after positional encoding.
  std::size_t effective_in_dim() const;
  // Input map, hidden maps, output map.
  std::size_t weight_layer_count() const { return hidden_layers + 2; }

  bool operator==(const BackboneConfig&) const = default;
};

/// Coordinate MLP. weights[n] is fan_in × fan_out and biases[n] is 1 × fan_out;
/// every layer but the last is followed by the backbone activation.
template <typename T>
struct Mlp {
  BackboneConfig config;
  std::vector<Matrix<T>> weights;
  std::vector<Matrix<T>> biases;

  std::size_t layer_count() const { return weights.size(); }
  std::size_t param_count() const;

  // Flattened order: layer by layer, weights (row-major) before biases.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  template <typename U>
  Mlp<U> cast() const {
    Mlp<U> out;
    out.config = config;
    for (const auto& w : weights) out.weights.push_back(w.template cast<U>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<U>());
    return out;
  }

  bool operator==(const Mlp&) const = default;
};

using MlpModel = Mlp<double>;

// Per-layer parameter gradients, shaped like the model.
template <typename T>
struct MlpGradients {
  std::vector<Matrix<T>> weights;
  std::vector<Matrix<T>> biases;

  std::vector<double> flatten() const;
};

template <typename T>
struct ForwardCache {
  const void* model = nullptr;
  std::vector<Matrix<T>> layer_inputs;     // input to layer n
  std::vector<Matrix<T>> pre_activations;  // z of each hidden layer

  bool valid() const { return model != nullptr && !layer_inputs.empty(); }
};

// Test hook: scales the sine activation derivative used by backward.
// Anything other than 1.0 corrupts gradients (negative control for gradcheck).
struct BackwardOptions {
  double sine_derivative_scale = 1.0;
};

/// Per coordinate v and band k in [0, L): (sin(2^k·π·v), cos(2^k·π·v)),
/// band-major within a coordinate, sin before cos.
template <typename T>
Matrix<T> positional_encoding(const Matrix<T>& coords, std::size_t bands);

template <typename T>
Mlp<T> init_model(const BackboneConfig& config, Rng& rng);

// Produces the first-layer features from already transformed coordinates:
// positional encoding for relu_pe, pass-through otherwise.
template <typename T>
Matrix<T> backbone_features(const BackboneConfig& config, const Matrix<T>& transformed_coords);

template <typename T>
Matrix<T> forward(const Mlp<T>& model, const Matrix<T>& features, ForwardCache<T>* cache = nullptr);

template <typename T>
MlpGradients<T> backward(const Mlp<T>& model, const ForwardCache<T>& cache,
                         const Matrix<T>& output_grad, const BackwardOptions& options = {});

std::size_t param_count(const BackboneConfig& config);

}  // namespace ssinr

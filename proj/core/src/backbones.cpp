#include "ssinr/backbones.hpp"

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace ssinr {

std::string to_string(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::ReluPe: return "relu_pe";
    case BackboneKind::Siren: return "siren";
    case BackboneKind::Finer: return "finer";
  }
  return "unknown";
}

BackboneKind parse_backbone_kind(const std::string& text) {
  if (text == "relu_pe" || text == "relu-pe") return BackboneKind::ReluPe;
  if (text == "siren") return BackboneKind::Siren;
  if (text == "finer") return BackboneKind::Finer;
  throw ConfigError("unknown backbone '" + text + "' (expected relu_pe, siren or finer)");
}

void BackboneConfig::validate() const {
  if (hidden_layers < 1) throw ContractViolation("backbone: hidden_layers must be >= 1");
  if (width < 1) throw ContractViolation("backbone: width must be >= 1");
  if (in_dim < 1 || out_dim < 1) throw ContractViolation("backbone: in/out dims must be >= 1");
  if (!(omega0 > 0.0)) throw ContractViolation("backbone: omega0 must be positive");
  if (pe_bands < 1) throw ContractViolation("backbone: pe_bands must be >= 1");
}

std::size_t BackboneConfig::effective_in_dim() const {
  return kind == BackboneKind::ReluPe ? 2 * pe_bands * in_dim : in_dim;
}

std::size_t param_count(const BackboneConfig& config) {
  config.validate();
  std::size_t total = 0;
  std::size_t fan_in = config.effective_in_dim();
  for (std::size_t n = 0; n < config.weight_layer_count(); ++n) {
    const std::size_t fan_out = n + 1 == config.weight_layer_count() ? config.out_dim : config.width;
    total += fan_in * fan_out + fan_out;
    fan_in = fan_out;
  }
  return total;
}

template <typename T>
std::size_t Mlp<T>::param_count() const {
  std::size_t total = 0;
  for (std::size_t n = 0; n < weights.size(); ++n) total += weights[n].size() + biases[n].size();
  return total;
}

template <typename T>
std::vector<double> Mlp<T>::flatten() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (std::size_t n = 0; n < weights.size(); ++n) {
    out.insert(out.end(), weights[n].data().begin(), weights[n].data().end());
    out.insert(out.end(), biases[n].data().begin(), biases[n].data().end());
  }
  return out;
}

template <typename T>
void Mlp<T>::unflatten(std::span<const double> params) {
  if (params.size() != param_count()) {
    throw ContractViolation("Mlp::unflatten: expected " + std::to_string(param_count()) +
                            " parameters, got " + std::to_string(params.size()));
  }
  std::size_t offset = 0;
  auto fill = [&](Matrix<T>& m) {
    for (T& v : m.data()) v = static_cast<T>(params[offset++]);
  };
  for (std::size_t n = 0; n < weights.size(); ++n) {
    fill(weights[n]);
    fill(biases[n]);
  }
}

template <typename T>
std::vector<double> MlpGradients<T>::flatten() const {
  std::vector<double> out;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    out.insert(out.end(), weights[n].data().begin(), weights[n].data().end());
    out.insert(out.end(), biases[n].data().begin(), biases[n].data().end());
  }
  return out;
}

template <typename T>
Matrix<T> positional_encoding(const Matrix<T>& coords, std::size_t bands) {
  if (bands == 0) throw ContractViolation("positional_encoding: band count must be >= 1");
  const std::size_t in_dim = coords.cols();
  Matrix<T> out(coords.rows(), 2 * bands * in_dim);
  for (std::size_t r = 0; r < coords.rows(); ++r) {
    auto src = coords.row(r);
    auto dst = out.row(r);
    std::size_t j = 0;
    for (std::size_t d = 0; d < in_dim; ++d) {
      const double v = static_cast<double>(src[d]);
      for (std::size_t k = 0; k < bands; ++k) {
        const double arg = std::ldexp(std::numbers::pi, static_cast<int>(k)) * v;
        dst[j++] = static_cast<T>(std::sin(arg));
        dst[j++] = static_cast<T>(std::cos(arg));
      }
    }
  }
  return out;
}

template <typename T>
Mlp<T> init_model(const BackboneConfig& config, Rng& rng) {
  config.validate();
  Mlp<T> model;
  model.config = config;
  std::size_t fan_in = config.effective_in_dim();
  const std::size_t layers = config.weight_layer_count();
  for (std::size_t n = 0; n < layers; ++n) {
    const std::size_t fan_out = n + 1 == layers ? config.out_dim : config.width;
    const double fi = static_cast<double>(fan_in);
    double bound = 0.0;
    switch (config.kind) {
      case BackboneKind::ReluPe: bound = std::sqrt(6.0 / fi); break;
      case BackboneKind::Siren:
      case BackboneKind::Finer:
        bound = n == 0 ? 1.0 / fi : std::sqrt(6.0 / fi) / config.omega0;
        break;
    }
    model.weights.push_back(uniform_fill<T>(rng, fan_in, fan_out, -bound, bound));
    if (config.kind == BackboneKind::Finer && n == 0) {
      model.biases.push_back(uniform_fill<T>(rng, 1, fan_out, -1.0, 1.0));
    } else {
      model.biases.emplace_back(1, fan_out);
    }
    fan_in = fan_out;
  }
  return model;
}

template <typename T>
Matrix<T> backbone_features(const BackboneConfig& config, const Matrix<T>& transformed_coords) {
  if (config.kind == BackboneKind::ReluPe) return positional_encoding(transformed_coords, config.pe_bands);
  return transformed_coords;
}

namespace {

template <typename T>
using Flat = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>, Eigen::Aligned64>;
template <typename T>
using ConstFlat = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>, Eigen::Aligned64>;

template <typename T>
Flat<T> flat(Matrix<T>& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.size())};
}
template <typename T>
ConstFlat<T> flat(const Matrix<T>& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.size())};
}

template <typename T>
void activate(BackboneKind kind, T omega0, Matrix<T>& z) {
  auto a = flat(z);
  switch (kind) {
    case BackboneKind::ReluPe: a = a.max(T{0}); break;
    case BackboneKind::Siren: a = (omega0 * a).sin(); break;
    case BackboneKind::Finer: a = (omega0 * (a.abs() + T{1}) * a).sin(); break;
  }
}

// grad ⊙ σ'(z), in place on grad.
template <typename T>
void activation_backward(BackboneKind kind, T omega0, const Matrix<T>& z, Matrix<T>& grad,
                         T sine_scale) {
  const auto zz = flat(z);
  auto g = flat(grad);
  switch (kind) {
    case BackboneKind::ReluPe: g = (zz > T{0}).select(g, T{0}); break;
    case BackboneKind::Siren: g *= (sine_scale * omega0) * (omega0 * zz).cos(); break;
    case BackboneKind::Finer:
      g *= (sine_scale * omega0) * (T{2} * zz.abs() + T{1}) * (omega0 * (zz.abs() + T{1}) * zz).cos();
      break;
  }
}

}  // namespace

template <typename T>
Matrix<T> forward(const Mlp<T>& model, const Matrix<T>& features, ForwardCache<T>* cache) {
  if (model.weights.empty()) throw ContractViolation("forward: model has no layers");
  if (features.cols() != model.weights.front().rows()) {
    throw ContractViolation("forward: input has " + std::to_string(features.cols()) +
                            " columns, first layer expects " +
                            std::to_string(model.weights.front().rows()));
  }
  if (cache != nullptr) {
    cache->model = &model;
    cache->layer_inputs.clear();
    cache->pre_activations.clear();
  }
  const T omega0 = static_cast<T>(model.config.omega0);
  Matrix<T> x = features;
  const std::size_t last = model.layer_count() - 1;
  for (std::size_t n = 0; n <= last; ++n) {
    Matrix<T> z = matmul(x, model.weights[n]);
    add_row_inplace(z, model.biases[n]);
    if (cache != nullptr) cache->layer_inputs.push_back(std::move(x));
    if (n == last) return z;
    if (cache != nullptr) cache->pre_activations.push_back(z);
    activate(model.config.kind, omega0, z);
    x = std::move(z);
  }
  return x;  // unreachable
}

template <typename T>
MlpGradients<T> backward(const Mlp<T>& model, const ForwardCache<T>& cache,
                         const Matrix<T>& output_grad, const BackwardOptions& options) {
  if (!cache.valid()) throw ContractViolation("backward: missing forward cache");
  if (cache.model != &model || cache.layer_inputs.size() != model.layer_count() ||
      cache.pre_activations.size() + 1 != model.layer_count()) {
    throw ContractViolation("backward: forward cache does not belong to this model");
  }
  const std::size_t batch = cache.layer_inputs.front().rows();
  if (output_grad.rows() != batch || output_grad.cols() != model.config.out_dim) {
    throw ContractViolation("backward: output gradient shape " + output_grad.shape_string() +
                            " does not match forward batch of " + std::to_string(batch) + " rows");
  }
  const T omega0 = static_cast<T>(model.config.omega0);
  const T sine_scale = static_cast<T>(options.sine_derivative_scale);

  MlpGradients<T> grads;
  grads.weights.resize(model.layer_count());
  grads.biases.resize(model.layer_count());
  Matrix<T> delta = output_grad;
  for (std::size_t n = model.layer_count(); n-- > 0;) {
    grads.weights[n] = matmul_tn(cache.layer_inputs[n], delta);
    grads.biases[n] = column_sums(delta);
    if (n == 0) break;
    Matrix<T> upstream = matmul_nt(delta, model.weights[n]);
    activation_backward(model.config.kind, omega0, cache.pre_activations[n - 1], upstream,
                        sine_scale);
    delta = std::move(upstream);
  }
  return grads;
}

#define SSINR_INSTANTIATE(T)                                                                 \
  template struct Mlp<T>;                                                                    \
  template struct MlpGradients<T>;                                                           \
  template Matrix<T> positional_encoding(const Matrix<T>&, std::size_t);                     \
  template Mlp<T> init_model<T>(const BackboneConfig&, Rng&);                                \
  template Matrix<T> backbone_features(const BackboneConfig&, const Matrix<T>&);             \
  template Matrix<T> forward(const Mlp<T>&, const Matrix<T>&, ForwardCache<T>*);             \
  template MlpGradients<T> backward(const Mlp<T>&, const ForwardCache<T>&, const Matrix<T>&, \
                                    const BackwardOptions&);

SSINR_INSTANTIATE(float)
SSINR_INSTANTIATE(double)

#undef SSINR_INSTANTIATE

}  // namespace ssinr

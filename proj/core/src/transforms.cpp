#include "ssinr/transforms.hpp"

#include <charconv>
#include <cmath>
#include <type_traits>

namespace ssinr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_number(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ConfigError("bad number '" + text + "' in transform '" + context + "'");
  }
  return value;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double kernel_value(double v, KernelKind kind, const KernelParams& p) {
  switch (kind) {
    case KernelKind::Polynomial: return std::pow(p.a * v + p.c, p.degree);
    case KernelKind::Gaussian: return std::exp(-(v * v) / (2.0 * p.sigma * p.sigma));
    case KernelKind::Radial: return std::exp(-p.gamma * v * v);
    case KernelKind::Exponential: return std::exp(-std::abs(v) / (2.0 * p.sigma * p.sigma));
    case KernelKind::Laplacian: return std::exp(-std::abs(v) / p.sigma);
  }
  return 0.0;
}

double kernel_slope(double v, KernelKind kind, const KernelParams& p) {
  switch (kind) {
    case KernelKind::Polynomial:
      return p.degree * p.a * std::pow(p.a * v + p.c, p.degree - 1);
    case KernelKind::Gaussian:
      return -v / (p.sigma * p.sigma) * kernel_value(v, kind, p);
    case KernelKind::Radial: return -2.0 * p.gamma * v * kernel_value(v, kind, p);
    case KernelKind::Exponential:
      return -sign(v) / (2.0 * p.sigma * p.sigma) * kernel_value(v, kind, p);
    case KernelKind::Laplacian: return -sign(v) / p.sigma * kernel_value(v, kind, p);
  }
  return 0.0;
}

template <typename T>
Matrix<T> map_kernel(const Matrix<T>& values, KernelKind kind, const KernelParams& params,
                     double (*fn)(double, KernelKind, const KernelParams&)) {
  params.validate();
  Matrix<T> out(values.rows(), values.cols());
  auto src = values.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const T v = static_cast<T>(fn(static_cast<double>(src[i]), kind, params));
    if (!std::isfinite(v)) {
      throw NumericError(to_string(kind) + " kernel produced a non-finite value");
    }
    dst[i] = v;
  }
  return out;
}

template <typename T>
Matrix<T> subtract_shift(const Matrix<T>& m, const ShiftValues& beta, double sign_) {
  Matrix<T> out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double b = beta.size() == 1 ? beta[0] : beta[c];
      row[c] = static_cast<T>(static_cast<double>(row[c]) + sign_ * b);
    }
  }
  return out;
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Radial: return "radial";
    case KernelKind::Exponential: return "exponential";
    case KernelKind::Laplacian: return "laplacian";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(const std::string& text) {
  for (KernelKind k : {KernelKind::Polynomial, KernelKind::Gaussian, KernelKind::Radial,
                       KernelKind::Exponential, KernelKind::Laplacian}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown kernel '" + text + "'");
}

void KernelParams::validate() const {
  if (degree < 1) throw ContractViolation("kernel: polynomial degree must be >= 1");
  if (!(sigma > 0.0)) throw ContractViolation("kernel: sigma must be positive");
  if (!(gamma > 0.0)) throw ContractViolation("kernel: gamma must be positive");
  if (!std::isfinite(a) || !std::isfinite(c)) {
    throw ContractViolation("kernel: polynomial coefficients must be finite");
  }
}

void TransformSpec::validate() const {
  std::visit(Overloaded{[](const transform::Scale& s) {
                          if (s.factor == 0.0 || !std::isfinite(s.factor))
                            throw ConfigError("input scale factor must be finite and non-zero");
                        },
                        [](const transform::Kernel& k) { k.params.validate(); },
                        [](const auto&) {}},
             input);
  std::visit(Overloaded{[](const transform::Scale& s) {
                          if (s.factor == 0.0 || !std::isfinite(s.factor))
                            throw ConfigError("output scale factor must be finite and non-zero");
                        },
                        [](const transform::Kernel& k) { k.params.validate(); },
                        [](const auto&) {}},
             output);
}

namespace {

template <typename Variant>
Variant parse_transform(const std::string& text, const KernelParams& params, bool output_side) {
  if (text == "identity" || text == "none") return transform::Identity{};
  if (text == "adaptive-shift") {
    if (!output_side) throw ConfigError("adaptive-shift is only valid on the output side");
    if constexpr (std::is_same_v<Variant, OutputTransform>) return transform::AdaptiveShift{};
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("unknown transform '" + text + "'");
  const std::string head = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  if (head == "scale") {
    const double s = parse_number(arg, text);
    if (s == 0.0) throw ConfigError("scale factor must be non-zero");
    return transform::Scale{s};
  }
  if (head == "shift") return transform::Shift{parse_number(arg, text)};
  if (head == "kernel") {
    params.validate();
    return transform::Kernel{parse_kernel_kind(arg), params};
  }
  throw ConfigError("unknown transform '" + text + "'");
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename Variant>
std::string format_transform(const Variant& t) {
  return std::visit(
      Overloaded{[](const transform::Identity&) -> std::string { return "identity"; },
                 [](const transform::Scale& s) { return "scale:" + format_number(s.factor); },
                 [](const transform::Shift& s) { return "shift:" + format_number(s.offset); },
                 [](const transform::AdaptiveShift&) -> std::string { return "adaptive-shift"; },
                 [](const transform::Kernel& k) { return "kernel:" + to_string(k.kind); }},
      t);
}

}  // namespace

InputTransform parse_input_transform(const std::string& text, const KernelParams& params) {
  return parse_transform<InputTransform>(text, params, false);
}

OutputTransform parse_output_transform(const std::string& text, const KernelParams& params) {
  return parse_transform<OutputTransform>(text, params, true);
}

std::string to_string(const InputTransform& t) { return format_transform(t); }
std::string to_string(const OutputTransform& t) { return format_transform(t); }

template <typename T>
Matrix<T> apply_nonlinear_kernel(const Matrix<T>& values, KernelKind kind,
                                 const KernelParams& params) {
  return map_kernel(values, kind, params, &kernel_value);
}

template <typename T>
Matrix<T> nonlinear_kernel_derivative(const Matrix<T>& values, KernelKind kind,
                                      const KernelParams& params) {
  return map_kernel(values, kind, params, &kernel_slope);
}

template <typename T>
Matrix<T> apply_linear(const Matrix<T>& values, double scale, double shift) {
  Matrix<T> out = values;
  const T s = static_cast<T>(scale);
  const T t = static_cast<T>(shift);
  for (T& v : out.data()) v = s * v + t;
  return out;
}

double compute_adaptive_shift(const Matrix2D& targets) {
  if (targets.empty()) throw ContractViolation("compute_adaptive_shift: empty targets");
  // accumulate offsets from the first value; exact for constant signals
  const double anchor = targets.data()[0];
  double sum = 0.0;
  for (double v : targets.data()) sum += v - anchor;
  return anchor + sum / static_cast<double>(targets.size());
}

std::vector<double> compute_adaptive_shift_per_channel(const Matrix2D& targets) {
  if (targets.empty()) throw ContractViolation("compute_adaptive_shift: empty targets");
  const auto anchor = targets.row(0);
  std::vector<double> sums(targets.cols(), 0.0);
  for (std::size_t r = 0; r < targets.rows(); ++r) {
    auto row = targets.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) sums[c] += row[c] - anchor[c];
  }
  for (std::size_t c = 0; c < sums.size(); ++c) {
    sums[c] = anchor[c] + sums[c] / static_cast<double>(targets.rows());
  }
  return sums;
}

ShiftValues resolve_output_shift(const TransformSpec& spec, const Matrix2D& targets) {
  if (std::holds_alternative<transform::Shift>(spec.output)) {
    return {std::get<transform::Shift>(spec.output).offset};
  }
  if (std::holds_alternative<transform::AdaptiveShift>(spec.output)) {
    if (targets.empty()) {
      throw ConfigError("adaptive-shift requires targets to compute the shift factor");
    }
    return spec.per_channel_shift ? compute_adaptive_shift_per_channel(targets)
                                  : ShiftValues{compute_adaptive_shift(targets)};
  }
  return {};
}

template <typename T>
Matrix<T> apply_input_transform(const Matrix<T>& coords, const TransformSpec& spec) {
  return std::visit(
      Overloaded{[&](const transform::Identity&) { return coords; },
                 [&](const transform::Scale& s) { return apply_linear(coords, s.factor, 0.0); },
                 [&](const transform::Shift& s) { return apply_linear(coords, 1.0, s.offset); },
                 [&](const transform::Kernel& k) {
                   return apply_nonlinear_kernel(coords, k.kind, k.params);
                 }},
      spec.input);
}

template <typename T>
Matrix<T> forward_output_transform(const Matrix<T>& raw, const TransformSpec& spec,
                                   const std::optional<ShiftValues>& beta) {
  return std::visit(
      Overloaded{[&](const transform::Identity&) { return raw; },
                 [&](const transform::Scale& s) { return apply_linear(raw, s.factor, 0.0); },
                 [&](const transform::Shift& s) { return subtract_shift(raw, {s.offset}, 1.0); },
                 [&](const transform::AdaptiveShift&) {
                   if (!beta || beta->empty()) {
                     throw ConfigError("adaptive-shift requested but no shift factor was computed");
                   }
                   if (beta->size() != 1 && beta->size() != raw.cols()) {
                     throw ContractViolation("adaptive-shift: per-channel shift has " +
                                             std::to_string(beta->size()) + " entries for " +
                                             std::to_string(raw.cols()) + " outputs");
                   }
                   return subtract_shift(raw, *beta, 1.0);
                 },
                 [&](const transform::Kernel& k) {
                   return apply_nonlinear_kernel(raw, k.kind, k.params);
                 }},
      spec.output);
}

template <typename T>
Matrix<T> backward_output_transform(const Matrix<T>& raw, const Matrix<T>& pred_grad,
                                    const TransformSpec& spec) {
  if (raw.rows() != pred_grad.rows() || raw.cols() != pred_grad.cols()) {
    throw ContractViolation("backward_output_transform: gradient shape " +
                            pred_grad.shape_string() + " vs output " + raw.shape_string());
  }
  return std::visit(
      Overloaded{[&](const transform::Scale& s) {
                   return scale(pred_grad, static_cast<T>(s.factor));
                 },
                 [&](const transform::Kernel& k) {
                   Matrix<T> g = nonlinear_kernel_derivative(raw, k.kind, k.params);
                   auto gd = g.data();
                   auto pd = pred_grad.data();
                   for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= pd[i];
                   return g;
                 },
                 [&](const auto&) { return pred_grad; }},
      spec.output);
}

#define SSINR_INSTANTIATE(T)                                                                  \
  template Matrix<T> apply_nonlinear_kernel(const Matrix<T>&, KernelKind, const KernelParams&); \
  template Matrix<T> nonlinear_kernel_derivative(const Matrix<T>&, KernelKind,                 \
                                                 const KernelParams&);                         \
  template Matrix<T> apply_linear(const Matrix<T>&, double, double);                          \
  template Matrix<T> apply_input_transform(const Matrix<T>&, const TransformSpec&);           \
  template Matrix<T> forward_output_transform(const Matrix<T>&, const TransformSpec&,         \
                                              const std::optional<ShiftValues>&);             \
  template Matrix<T> backward_output_transform(const Matrix<T>&, const Matrix<T>&,            \
                                               const TransformSpec&);

SSINR_INSTANTIATE(float)
SSINR_INSTANTIATE(double)

#undef SSINR_INSTANTIATE

}  // namespace ssinr

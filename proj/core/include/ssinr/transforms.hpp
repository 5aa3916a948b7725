#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssinr/numerics.hpp"

namespace ssinr {

enum class KernelKind { Polynomial, Gaussian, Radial, Exponential, Laplacian };

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(const std::string& text);

struct KernelParams {
  double a = 1.0;      // polynomial slope
  double c = 1.0;      // polynomial offset
  int degree = 3;      // polynomial degree
  double sigma = 1.0;  // gaussian / exponential / laplacian width
  double gamma = 1.0;  // radial coefficient

  void validate() const;
  bool operator==(const KernelParams&) const = default;
};

namespace transform {
struct Identity {
  bool operator==(const Identity&) const = default;
};
struct Scale {
  double factor;
  bool operator==(const Scale&) const = default;
};
struct Shift {
  double offset;
  bool operator==(const Shift&) const = default;
};
// Output shift by the mean of the (normalized) targets.
struct AdaptiveShift {
  bool operator==(const AdaptiveShift&) const = default;
};
struct Kernel {
  KernelKind kind;
  KernelParams params;
  bool operator==(const Kernel&) const = default;
};
}  // namespace transform

using InputTransform =
    std::variant<transform::Identity, transform::Scale, transform::Shift, transform::Kernel>;
using OutputTransform = std::variant<transform::Identity, transform::Scale, transform::Shift,
                                     transform::AdaptiveShift, transform::Kernel>;

struct TransformSpec {
  InputTransform input = transform::Identity{};
  OutputTransform output = transform::Identity{};
  // Adaptive shift computes one mean per output channel instead of a scalar.
  bool per_channel_shift = false;

  void validate() const;
  bool operator==(const TransformSpec&) const = default;
};

// Text forms: "identity", "scale:<s>", "shift:<t>", "adaptive-shift" (output
// only), "kernel:<kind>". Kernel hyperparameters travel separately.
InputTransform parse_input_transform(const std::string& text, const KernelParams& params = {});
OutputTransform parse_output_transform(const std::string& text, const KernelParams& params = {});
std::string to_string(const InputTransform& t);
std::string to_string(const OutputTransform& t);

// Elementwise kernel; |v| stands in for the vector norm. Throws NumericError naming the kernel on overflow.
template <typename T>
Matrix<T> apply_nonlinear_kernel(const Matrix<T>& values, KernelKind kind,
                                 const KernelParams& params);
// dk/dv elementwise. d|v|/dv is taken as sign(v) with sign(0) = 0.
template <typename T>
Matrix<T> nonlinear_kernel_derivative(const Matrix<T>& values, KernelKind kind,
                                      const KernelParams& params);

template <typename T>
Matrix<T> apply_linear(const Matrix<T>& values, double scale, double shift);

double compute_adaptive_shift(const Matrix2D& targets);
std::vector<double> compute_adaptive_shift_per_channel(const Matrix2D& targets);

// Shift values resolved for an output transform: empty when the transform
// needs none, one entry for a scalar shift, out_dim entries per channel.
using ShiftValues = std::vector<double>;

// Resolves the concrete shift used at train and inference time.
ShiftValues resolve_output_shift(const TransformSpec& spec, const Matrix2D& targets);

template <typename T>
Matrix<T> apply_input_transform(const Matrix<T>& coords, const TransformSpec& spec);

// ŷ = transform(f(x)). `beta` must be present for AdaptiveShift.
template <typename T>
Matrix<T> forward_output_transform(const Matrix<T>& raw_model_output, const TransformSpec& spec,
                                   const std::optional<ShiftValues>& beta);

// ∂L/∂f(x) given ∂L/∂ŷ.
template <typename T>
Matrix<T> backward_output_transform(const Matrix<T>& raw_model_output, const Matrix<T>& pred_grad,
                                    const TransformSpec& spec);

}  // namespace ssinr

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssinr/transforms.hpp"

namespace ssinr {
namespace {

Matrix2D scalar(double v) { return Matrix2D(1, 1, v); }

double kernel_at(double v, KernelKind kind, KernelParams p = {}) {
  return apply_nonlinear_kernel(scalar(v), kind, p)(0, 0);
}

TEST(Kernel, GaussianAtZeroIsOne) { EXPECT_EQ(kernel_at(0.0, KernelKind::Gaussian), 1.0); }

TEST(Kernel, PolynomialCube) {
  KernelParams p;
  p.a = 2.0;
  p.c = 1.0;
  p.degree = 3;
  EXPECT_DOUBLE_EQ(kernel_at(0.5, KernelKind::Polynomial, p), 8.0);
}

TEST(Kernel, LaplacianAtOne) {
  EXPECT_NEAR(kernel_at(1.0, KernelKind::Laplacian), 0.367879, 1e-6);
}

TEST(Kernel, GaussianIsSymmetric) {
  EXPECT_EQ(kernel_at(1.0, KernelKind::Gaussian), kernel_at(-1.0, KernelKind::Gaussian));
}

TEST(Kernel, PreservesShape) {
  const auto v = testing::random_matrix(3, 7, 2);
  const auto out = apply_nonlinear_kernel(v, KernelKind::Radial, {});
  EXPECT_EQ(out.rows(), 7u);
  EXPECT_EQ(out.cols(), 2u);
}

TEST(Kernel, RejectsInvalidParams) {
  KernelParams bad;
  bad.sigma = 0.0;
  EXPECT_THROW(apply_nonlinear_kernel(scalar(1.0), KernelKind::Gaussian, bad), ContractViolation);
  bad = {};
  bad.degree = 0;
  EXPECT_THROW(apply_nonlinear_kernel(scalar(1.0), KernelKind::Polynomial, bad), ContractViolation);
  bad = {};
  bad.gamma = -1.0;
  EXPECT_THROW(apply_nonlinear_kernel(scalar(1.0), KernelKind::Radial, bad), ContractViolation);
}

TEST(Kernel, OverflowNamesKernel) {
  KernelParams p;
  p.a = 1e200;
  try {
    apply_nonlinear_kernel(scalar(1.0), KernelKind::Polynomial, p);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("polynomial"), std::string::npos);
  }
}

TEST(KernelProperty, ValueAtZero) {
  for (int d = 1; d <= 5; ++d) {
    KernelParams p;
    p.c = 0.7;
    p.degree = d;
    p.sigma = 0.3 * d;
    p.gamma = 2.0 / d;
    EXPECT_DOUBLE_EQ(kernel_at(0.0, KernelKind::Polynomial, p), std::pow(0.7, d));
    for (KernelKind k : {KernelKind::Gaussian, KernelKind::Radial, KernelKind::Exponential,
                         KernelKind::Laplacian}) {
      EXPECT_EQ(kernel_at(0.0, k, p), 1.0);
    }
  }
}

TEST(KernelProperty, EvenAndAbsoluteValueKernels) {
  const auto v = testing::random_matrix(11, 50, 1, -4.0, 4.0);
  const auto neg = scale(v, -1.0);
  for (KernelKind k : {KernelKind::Gaussian, KernelKind::Radial, KernelKind::Exponential,
                       KernelKind::Laplacian}) {
    EXPECT_EQ(apply_nonlinear_kernel(v, k, {}), apply_nonlinear_kernel(neg, k, {})) << to_string(k);
  }
}

TEST(KernelProperty, DerivativeMatchesFiniteDifferences) {
  const auto v = testing::random_matrix(12, 20, 1, -2.0, 2.0);
  KernelParams p;
  p.a = 0.8;
  p.c = 0.3;
  p.sigma = 0.9;
  p.gamma = 1.7;
  for (KernelKind k : {KernelKind::Polynomial, KernelKind::Gaussian, KernelKind::Radial,
                       KernelKind::Exponential, KernelKind::Laplacian}) {
    const auto analytic = nonlinear_kernel_derivative(v, k, p);
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const std::vector<double> at{v(i, 0)};
      const auto fd = finite_diff_gradient(
          [&](std::span<const double> t) { return apply_nonlinear_kernel(scalar(t[0]), k, p)(0, 0); }, at);
      EXPECT_NEAR(analytic(i, 0), fd[0], 1e-6 * std::max(1.0, std::abs(fd[0]))) << to_string(k);
    }
  }
}

TEST(Linear, InputScaleFiveSpansPlusMinusFive) {
  const auto v = Matrix2D::from_rows({{-1.0}, {0.0}, {1.0}});
  const auto out = apply_linear(v, 5.0, 0.0);
  EXPECT_EQ(out(0, 0), -5.0);
  EXPECT_EQ(out(2, 0), 5.0);
}

TEST(Linear, UnitScaleIsIdentity) {
  const auto v = testing::random_matrix(4, 9, 3);
  EXPECT_EQ(apply_linear(v, 1.0, 0.0), v);
}

TEST(Linear, ReluPeScale) {
  const auto out = apply_linear(Matrix2D::from_rows({{-1.0}, {1.0}}), 0.3, 0.0);
  EXPECT_DOUBLE_EQ(out(0, 0), -0.3);
  EXPECT_DOUBLE_EQ(out(1, 0), 0.3);
}

TEST(LinearProperty, ScaleThenInverseScaleRoundTrips) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto v = testing::random_matrix(seed, 10, 2, -50, 50);
    const double s = 0.1 + static_cast<double>(seed);
    const auto back = apply_linear(apply_linear(v, s, 0.0), 1.0 / s, 0.0);
    EXPECT_LT(testing::max_relative_error(back.data(), v.data(), 1e-300), 1e-12);
  }
}

TEST(AdaptiveShift, ConstantImage) {
  EXPECT_DOUBLE_EQ(compute_adaptive_shift(Matrix2D(8, 3, 0.25)), 0.25);
}

TEST(AdaptiveShift, SymmetricTargets) {
  EXPECT_EQ(compute_adaptive_shift(Matrix2D::from_rows({{-0.5}, {0.5}})), 0.0);
}

TEST(AdaptiveShift, ArithmeticMean) {
  EXPECT_NEAR(compute_adaptive_shift(Matrix2D::from_rows({{0.2}, {0.4}, {0.6}})), 0.4, 1e-15);
}

TEST(AdaptiveShift, EmptyTargetsRejected) {
  EXPECT_THROW(compute_adaptive_shift(Matrix2D()), ContractViolation);
}

TEST(AdaptiveShift, PerChannelMeans) {
  const auto t = Matrix2D::from_rows({{0.0, 1.0}, {0.5, -1.0}});
  EXPECT_EQ(compute_adaptive_shift_per_channel(t), (std::vector<double>{0.25, 0.0}));
}

TEST(OutputTransform, IdentityPassesThrough) {
  const auto raw = testing::random_matrix(5, 6, 3);
  EXPECT_EQ(forward_output_transform(raw, TransformSpec{}, std::nullopt), raw);
}

TEST(OutputTransform, ShiftOfZeroOutput) {
  TransformSpec spec;
  spec.output = transform::AdaptiveShift{};
  const auto out = forward_output_transform(Matrix2D(4, 1), spec, ShiftValues{0.4});
  for (double v : out.data()) EXPECT_EQ(v, 0.4);
}

TEST(OutputTransform, ScaleOnOutput) {
  TransformSpec spec;
  spec.output = transform::Scale{2.0};
  EXPECT_EQ(forward_output_transform(Matrix2D(1, 1, 0.25), spec, std::nullopt)(0, 0), 0.5);
}

TEST(OutputTransform, AdaptiveShiftWithoutBetaIsConfigError) {
  TransformSpec spec;
  spec.output = transform::AdaptiveShift{};
  EXPECT_THROW(forward_output_transform(Matrix2D(2, 1), spec, std::nullopt), ConfigError);
}

TEST(TransformText, ParsesAndFormats) {
  EXPECT_EQ(parse_input_transform("scale:5"), InputTransform{transform::Scale{5.0}});
  EXPECT_EQ(parse_input_transform("shift:-10"), InputTransform{transform::Shift{-10.0}});
  EXPECT_EQ(parse_output_transform("adaptive-shift"), OutputTransform{transform::AdaptiveShift{}});
  EXPECT_EQ(to_string(parse_output_transform("shift:0.2")), "shift:0.2");
  KernelParams p;
  p.sigma = 2.0;
  const auto k = parse_input_transform("kernel:laplacian", p);
  EXPECT_EQ(std::get<transform::Kernel>(k).params.sigma, 2.0);
}

TEST(TransformText, RejectsBadInput) {
  EXPECT_THROW(parse_input_transform("adaptive-shift"), ConfigError);
  EXPECT_THROW(parse_input_transform("scale:0"), ConfigError);
  EXPECT_THROW(parse_input_transform("scale:abc"), ConfigError);
  EXPECT_THROW(parse_output_transform("kernel:sigmoid"), ConfigError);
  EXPECT_THROW(parse_output_transform("rotate:3"), ConfigError);
}

}  // namespace
}  // namespace ssinr

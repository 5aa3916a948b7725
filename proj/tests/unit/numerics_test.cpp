#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssinr/numerics.hpp"

namespace ssinr {
namespace {

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const auto a = Matrix2D::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(matmul(Matrix2D::identity(2), a), a);
}

TEST(Matmul, ZeroVector) {
  const auto a = Matrix2D::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(matmul(a, Matrix2D(2, 1)), Matrix2D(2, 1));
}

TEST(Matmul, DirectArithmetic) {
  const auto a = Matrix2D::from_rows({{1, 2}, {3, 4}});
  const auto b = Matrix2D::from_rows({{5}, {6}});
  EXPECT_EQ(matmul(a, b), Matrix2D::from_rows({{17}, {39}}));
}

TEST(Matmul, MismatchNamesBothShapes) {
  try {
    matmul(Matrix2D(2, 3), Matrix2D(2, 3));
    FAIL() << "expected ContractViolation";
  } catch (const ContractViolation& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3 and 2x3"), std::string::npos) << msg;
  }
}

TEST(Matmul, TransposedVariantsAgreeWithExplicitTranspose) {
  const auto a = testing::random_matrix(1, 5, 3);
  const auto b = testing::random_matrix(2, 5, 4);
  Matrix2D at(3, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) at(j, i) = a(i, j);
  const auto tn = matmul_tn(a, b);
  const auto ref = matmul(at, b);
  for (std::size_t i = 0; i < tn.size(); ++i) EXPECT_NEAR(tn.data()[i], ref.data()[i], 1e-14);

  const auto c = testing::random_matrix(3, 4, 3);
  Matrix2D ct(3, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) ct(j, i) = c(i, j);
  const auto nt = matmul_nt(a, c);
  const auto ref2 = matmul(a, ct);
  for (std::size_t i = 0; i < nt.size(); ++i) EXPECT_NEAR(nt.data()[i], ref2.data()[i], 1e-14);
}

TEST(MatmulProperty, IdentityIsExactForRandomMatrices) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t rows = 1 + seed % 7;
    const std::size_t cols = 1 + (seed * 3) % 5;
    const auto a = testing::random_matrix(seed, rows, cols, -100, 100);
    EXPECT_EQ(matmul(Matrix2D::identity(rows), a), a);
  }
}

TEST(MatmulProperty, DistributesOverAddition) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + seed % 9;
    const std::size_t k = 1 + (seed * 5) % 11;
    const std::size_t m = 1 + (seed * 7) % 6;
    const auto a = testing::random_matrix(seed, n, k);
    const auto b = testing::random_matrix(seed + 100, k, m);
    const auto c = testing::random_matrix(seed + 200, k, m);
    const auto lhs = matmul(a, add(b, c));
    const auto rhs = add(matmul(a, b), matmul(a, c));
    double scale_ = 0.0;
    for (double v : lhs.data()) scale_ = std::max(scale_, std::abs(v));
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      EXPECT_LE(std::abs(lhs.data()[i] - rhs.data()[i]), 1e-12 * std::max(1.0, scale_));
    }
  }
}

TEST(Matrix, RejectsWrongDataLength) {
  EXPECT_THROW(Matrix2D(2, 2, std::vector<double>(3)), ContractViolation);
}

TEST(Rng, MatchesReferenceSequence) {
  // Values from an independent reimplementation of the generator.
  Rng rng(42);
  EXPECT_EQ(rng.next_u64(), 0xccf7d1667ea41d4dULL);
  EXPECT_EQ(rng.next_u64(), 0xda9e4b397e1a2212ULL);
  EXPECT_EQ(rng.next_u64(), 0x11e392617dcf385cULL);
}

TEST(Rng, DerivedStreamsDoNotAdvanceParent) {
  Rng a(7);
  Rng b(7);
  (void)a.derive(3).next_u64();
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(Rng(7).derive(0).next_u64(), Rng(7).derive(1).next_u64());
}

TEST(Rng, DeriveSeedSeparatesCellsAndTrials) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
}

TEST(UniformFill, DegenerateIntervalIsConstant) {
  Rng rng(1);
  EXPECT_EQ(uniform_fill<double>(rng, 3, 4, 0.0, 0.0), Matrix2D(3, 4));
}

TEST(UniformFill, SameSeedSameMatrix) {
  Rng r1(42), r2(42);
  EXPECT_EQ(uniform_fill<double>(r1, 2, 2, 0.0, 1.0), uniform_fill<double>(r2, 2, 2, 0.0, 1.0));
}

TEST(UniformFill, DifferentSeedsDiffer) {
  Rng r1(42), r2(43);
  EXPECT_NE(uniform_fill<double>(r1, 64, 64, 0.0, 1.0), uniform_fill<double>(r2, 64, 64, 0.0, 1.0));
}

TEST(UniformFill, RejectsInvertedBounds) {
  Rng rng(1);
  EXPECT_THROW(uniform_fill<double>(rng, 1, 1, 1.0, 0.0), ContractViolation);
}

TEST(UniformFillProperty, EntriesStayInHalfOpenInterval) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const double lo = -static_cast<double>(seed % 5) * 0.37;
    const double hi = lo + 1e-6 + static_cast<double>(seed % 3);
    const auto d = uniform_fill<double>(rng, 17, 13, lo, hi);
    Rng rng2(seed);
    const auto f = uniform_fill<float>(rng2, 17, 13, lo, hi);
    for (double v : d.data()) {
      EXPECT_GE(v, lo);
      EXPECT_LT(v, hi);
    }
    for (float v : f.data()) {
      EXPECT_GE(v, static_cast<float>(lo));
      EXPECT_LT(v, static_cast<float>(hi));
    }
  }
}

TEST(FiniteDiff, Square) {
  const std::vector<double> theta{3.0};
  const auto g = finite_diff_gradient([](std::span<const double> t) { return t[0] * t[0]; }, theta);
  EXPECT_NEAR(g[0], 6.0, 1e-8);
}

TEST(FiniteDiff, ConstantHasZeroGradient) {
  const std::vector<double> theta{1.0, -2.0, 5.0};
  const auto g = finite_diff_gradient([](std::span<const double>) { return 4.2; }, theta);
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(FiniteDiff, SineAtZero) {
  const std::vector<double> theta{0.0};
  const auto g = finite_diff_gradient([](std::span<const double> t) { return std::sin(t[0]); }, theta);
  EXPECT_NEAR(g[0], 1.0, 1e-9);
}

TEST(FiniteDiff, NonFiniteObjectiveReportsIndex) {
  const std::vector<double> theta{1.0, 0.0, 1.0};
  try {
    // sqrt goes NaN only when the middle parameter is stepped negative
    finite_diff_gradient([](std::span<const double> t) { return t[0] + std::sqrt(t[1]) + t[2]; }, theta);
    FAIL() << "expected OracleFailure";
  } catch (const OracleFailure& e) {
    EXPECT_EQ(e.index(), 1u);
  }
}

TEST(FiniteDiffProperty, QuadraticFormGradientIsQTheta) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 2 + seed % 6;
    const auto r = testing::random_matrix(seed, n, n);
    Matrix2D q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q(i, j) = r(i, j) + r(j, i);
    auto theta_m = testing::random_matrix(seed + 99, n, 1, -10.0 / std::sqrt(n), 10.0 / std::sqrt(n));
    std::vector<double> theta(theta_m.data().begin(), theta_m.data().end());
    auto f = [&](std::span<const double> t) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += t[i] * q(i, j) * t[j];
      return 0.5 * acc;
    };
    const auto g = finite_diff_gradient(f, theta);
    const auto expect = matmul(q, theta_m);
    EXPECT_LT(testing::max_relative_error(g, expect.data(), 1e-6), 1e-6);
  }
}

}  // namespace
}  // namespace ssinr

#pragma once

// Reference implementations used only by tests. Each one is written
// independently of the production code path it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ssinr/backbones.hpp"
#include "ssinr/numerics.hpp"
#include "ssinr/training.hpp"
#include "ssinr/transforms.hpp"

namespace ssinr::testing {

inline Matrix2D random_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols,
                              double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  return uniform_fill<double>(rng, rows, cols, lo, hi);
}

// max_i |a_i − b_i| / max(|a_i|, |b_i|, floor)
inline double max_relative_error(std::span<const double> a, std::span<const double> b,
                                 double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

// max_i |a_i − b_i| / max_i |b_i|
inline double norm_relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale == 0.0 ? diff : diff / scale;
}

// Smallest |z| over the hidden pre-activations.
inline double kink_margin(const ForwardCache<double>& cache) {
  double margin = INFINITY;
  for (const auto& z : cache.pre_activations)
    for (double v : z.data()) margin = std::min(margin, std::abs(v));
  return margin;
}

// First seed at or after `seed` whose relu network has every hidden
// pre-activation at least `margin` away from zero on `features`.
inline std::uint64_t kink_free_seed(const BackboneConfig& config, const Matrix2D& features,
                                    std::uint64_t seed, double margin = 1e-3) {
  for (;; ++seed) {
    Rng rng(seed);
    const auto m = init_model<double>(config, rng);
    ForwardCache<double> cache;
    forward(m, features, &cache);
    if (kink_margin(cache) >= margin) return seed;
  }
}

/// Brute-force SSIM: for every window position, explicit 2-D Gaussian weights
/// and direct weighted sums. No separable filtering.
inline double brute_force_ssim(const Matrix2D& a, const Matrix2D& b, std::size_t h,
                               std::size_t w) {
  const std::size_t side = std::min<std::size_t>({11, h, w});
  const double centre = (static_cast<double>(side) - 1.0) / 2.0;
  std::vector<double> weights(side * side);
  double wsum = 0.0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double di = static_cast<double>(i) - centre;
      const double dj = static_cast<double>(j) - centre;
      weights[i * side + j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
      wsum += weights[i * side + j];
    }
  }
  for (double& v : weights) v /= wsum;
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  double channel_total = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t y = 0; y + side <= h; ++y) {
      for (std::size_t x = 0; x + side <= w; ++x) {
        double ma = 0, mb = 0;
        for (std::size_t i = 0; i < side; ++i)
          for (std::size_t j = 0; j < side; ++j) {
            const double wt = weights[i * side + j];
            ma += wt * a((y + i) * w + x + j, c);
            mb += wt * b((y + i) * w + x + j, c);
          }
        double va = 0, vb = 0, cov = 0;
        for (std::size_t i = 0; i < side; ++i)
          for (std::size_t j = 0; j < side; ++j) {
            const double wt = weights[i * side + j];
            const double da = a((y + i) * w + x + j, c) - ma;
            const double db = b((y + i) * w + x + j, c) - mb;
            va += wt * da * da;
            vb += wt * db * db;
            cov += wt * da * db;
          }
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
    channel_total += total / static_cast<double>(count);
  }
  return channel_total / static_cast<double>(a.cols());
}

/// Loss of the full pipeline as a function of the flattened parameters; uses
/// only forward evaluation.
inline std::function<double(std::span<const double>)> pipeline_loss(
    const MlpModel& model, const Matrix2D& coords, const Matrix2D& targets,
    const TransformSpec& spec, const ShiftValues& beta) {
  return [=](std::span<const double> theta) {
    MlpModel m = model;
    m.unflatten(theta);
    const Matrix2D pred = predict(m, coords, spec, beta);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double d = pred.data()[i] - targets.data()[i];
      acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
  };
}

}  // namespace ssinr::testing

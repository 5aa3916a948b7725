#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssinr/numerics.hpp"

namespace ssinr {

// Reported in place of +inf when the error is exactly zero.
inline constexpr double kPsnrCap = 100.0;

struct SsimParams {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  // Normalized 1-D Gaussian taps for a window of the given side.
  std::vector<double> taps(std::size_t side) const;
};

struct TrialStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

double mean_squared_error(const Matrix2D& pred, const Matrix2D& target);
double psnr_from_mse(double mse, double peak = 1.0);
double psnr(const Matrix2D& pred, const Matrix2D& target, double peak = 1.0);

/// Mean SSIM over valid window positions. pred/target are (height·width) × channels
/// in row-major pixel order; channels are scored separately and averaged. Images
/// smaller than the window use a window of side min(window, height, width).
double ssim(const Matrix2D& pred, const Matrix2D& target, std::size_t height, std::size_t width,
            const SsimParams& params = {});

TrialStats aggregate_trials(std::span<const double> values);

// Linear map of [lo, hi] onto [0, 1].
Matrix2D rescale_to_unit(const Matrix2D& values, double lo, double hi);

}  // namespace ssinr

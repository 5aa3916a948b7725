#include "ssinr/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace ssinr {

namespace {

void require_same_shape(const char* op, const Matrix2D& a, const Matrix2D& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractViolation(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                            b.shape_string());
  }
}

// Separable 'valid' correlation of an h×w plane with taps (side s).
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& taps) {
  const std::size_t s = taps.size();
  const std::size_t oh = h - s + 1;
  const std::size_t ow = w - s + 1;
  std::vector<double> horizontal(h * ow, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k) acc += taps[k] * plane[y * w + x + k];
      horizontal[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k) acc += taps[k] * horizontal[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

double ssim_plane(const std::vector<double>& a, const std::vector<double>& b, std::size_t h,
                  std::size_t w, const std::vector<double>& taps, double c1, double c2) {
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, h, w, taps);
  const auto mu_b = filter_valid(b, h, w, taps);
  const auto e_aa = filter_valid(aa, h, w, taps);
  const auto e_bb = filter_valid(bb, h, w, taps);
  const auto e_ab = filter_valid(ab, h, w, taps);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

}  // namespace

std::vector<double> SsimParams::taps(std::size_t side) const {
  std::vector<double> t(side);
  const double centre = (static_cast<double>(side) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < side; ++i) {
    const double d = static_cast<double>(i) - centre;
    t[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += t[i];
  }
  for (double& v : t) v /= sum;
  return t;
}

double mean_squared_error(const Matrix2D& pred, const Matrix2D& target) {
  require_same_shape("mse", pred, target);
  if (pred.empty()) throw ContractViolation("mse: empty input");
  double acc = 0.0;
  auto p = pred.data();
  auto t = target.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    acc += d * d;
  }
  return acc / static_cast<double>(p.size());
}

double psnr_from_mse(double mse, double peak) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double psnr(const Matrix2D& pred, const Matrix2D& target, double peak) {
  return psnr_from_mse(mean_squared_error(pred, target), peak);
}

double ssim(const Matrix2D& pred, const Matrix2D& target, std::size_t height, std::size_t width,
            const SsimParams& params) {
  require_same_shape("ssim", pred, target);
  if (height == 0 || width == 0 || pred.rows() != height * width) {
    throw ContractViolation("ssim: " + pred.shape_string() + " is not a " +
                            std::to_string(height) + "x" + std::to_string(width) + " image");
  }
  const std::size_t side = std::min({params.window, height, width});
  const auto taps = params.taps(side);
  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0.0;
  std::vector<double> a(pred.rows()), b(pred.rows());
  for (std::size_t c = 0; c < pred.cols(); ++c) {
    for (std::size_t i = 0; i < pred.rows(); ++i) {
      a[i] = pred(i, c);
      b[i] = target(i, c);
    }
    total += ssim_plane(a, b, height, width, taps, c1, c2);
  }
  return total / static_cast<double>(pred.cols());
}

TrialStats aggregate_trials(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("aggregate_trials: no values");
  TrialStats stats;
  stats.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return stats;
}

Matrix2D rescale_to_unit(const Matrix2D& values, double lo, double hi) {
  if (!(hi > lo)) throw ContractViolation("rescale_to_unit: empty range");
  Matrix2D out = values;
  const double span = hi - lo;
  for (double& v : out.data()) v = (v - lo) / span;
  return out;
}

}  // namespace ssinr

#include "ssinr/numerics.hpp"

#include <Eigen/Core>
#include <cmath>
#include <sstream>

namespace ssinr {

namespace {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
Eigen::Map<const RowMajor<T>, Eigen::Aligned64> view(const Matrix<T>& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

template <typename T>
Eigen::Map<RowMajor<T>, Eigen::Aligned64> view(Matrix<T>& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

template <typename T>
[[noreturn]] void shape_error(const char* op, const Matrix<T>& a, const Matrix<T>& b) {
  throw ContractViolation(std::string(op) + ": incompatible shapes " + a.shape_string() +
                          " and " + b.shape_string());
}

template <typename T>
void require_same_shape(const char* op, const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error(op, a, b);
}

}  // namespace

std::string to_string(Precision p) { return p == Precision::Single ? "single" : "double"; }

Precision parse_precision(const std::string& text) {
  if (text == "single" || text == "float" || text == "f32") return Precision::Single;
  if (text == "double" || text == "f64") return Precision::Double;
  throw ConfigError("unknown precision '" + text + "' (expected single or double)");
}

template <typename T>
Matrix<T>::Matrix(std::size_t rows, std::size_t cols, const std::vector<T>& data)
    : rows_(rows), cols_(cols), data_(data.begin(), data.end()) {
  if (data_.size() != rows_ * cols_) {
    throw ContractViolation("Matrix: data length " + std::to_string(data_.size()) +
                            " does not match shape " + shape_string());
  }
}

template <typename T>
Matrix<T> Matrix<T>::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
  return m;
}

template <typename T>
Matrix<T> Matrix<T>::from_rows(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<T> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ContractViolation("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, data);
}

template <typename T>
std::string Matrix<T>::shape_string() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  Matrix<T> out(a.rows(), b.cols());
  if (a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b);
  return out;
}

template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
  Matrix<T> out(a.cols(), b.cols());
  if (a.rows() == 0) return out;
  view(out).noalias() = view(a).transpose() * view(b);
  return out;
}

template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.cols()) shape_error("matmul_nt", a, b);
  Matrix<T> out(a.rows(), b.rows());
  if (a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b).transpose();
  return out;
}

template <typename T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b) {
  require_same_shape("add", a, b);
  Matrix<T> out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

template <typename T>
Matrix<T> subtract(const Matrix<T>& a, const Matrix<T>& b) {
  require_same_shape("subtract", a, b);
  Matrix<T> out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
  return out;
}

template <typename T>
Matrix<T> scale(const Matrix<T>& a, T factor) {
  Matrix<T> out = a;
  for (T& v : out.data()) v *= factor;
  return out;
}

template <typename T>
void add_row_inplace(Matrix<T>& a, const Matrix<T>& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) shape_error("add_row", a, row);
  auto r = row.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = a.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += r[j];
  }
}

template <typename T>
Matrix<T> column_sums(const Matrix<T>& a) {
  Matrix<T> out(1, a.cols());
  auto o = out.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto src = a.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) o[j] += src[j];
  }
  return out;
}

template <typename T>
bool all_finite(const Matrix<T>& a) {
  for (T v : a.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// SplitMix64 finalizer.
std::uint64_t Rng::mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t c = counter_++;
  return mix(key_ ^ mix(c));
}

double Rng::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

Rng Rng::derive(std::uint64_t index) const {
  Rng child(0);
  child.seed_ = seed_;
  child.key_ = mix(key_ + mix(index ^ 0x5851f42d4c957f2dULL));
  return child;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial) {
  return Rng::mix(Rng::mix(Rng::mix(base) ^ cell) ^ (trial + 0x632be59bd9b4e019ULL));
}

template <typename T>
Matrix<T> uniform_fill(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  if (!(lo <= hi)) {
    throw ContractViolation("uniform_fill: lower bound exceeds upper bound");
  }
  Matrix<T> out(rows, cols);
  for (T& v : out.data()) {
    const double u = rng.next_unit();
    T x = static_cast<T>(lo + (hi - lo) * u);
    // rounding into T can land on hi; keep the interval half-open
    if (hi > lo && x >= static_cast<T>(hi)) x = std::nextafter(static_cast<T>(hi), static_cast<T>(lo));
    if (x < static_cast<T>(lo)) x = static_cast<T>(lo);
    v = x;
  }
  return out;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> theta, double h) {
  if (!(h > 0.0)) throw ContractViolation("finite_diff_gradient: step must be positive");
  std::vector<double> point(theta.begin(), theta.end());
  std::vector<double> grad(point.size());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double original = point[i];
    point[i] = original + h;
    const double plus = f(point);
    point[i] = original - h;
    const double minus = f(point);
    point[i] = original;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw OracleFailure(i, "finite_diff_gradient: objective is non-finite at parameter " +
                                 std::to_string(i));
    }
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

#define SSINR_INSTANTIATE(T)                                                              \
  template class Matrix<T>;                                                               \
  template Matrix<T> matmul(const Matrix<T>&, const Matrix<T>&);                          \
  template Matrix<T> matmul_tn(const Matrix<T>&, const Matrix<T>&);                       \
  template Matrix<T> matmul_nt(const Matrix<T>&, const Matrix<T>&);                       \
  template Matrix<T> add(const Matrix<T>&, const Matrix<T>&);                             \
  template Matrix<T> subtract(const Matrix<T>&, const Matrix<T>&);                        \
  template Matrix<T> scale(const Matrix<T>&, T);                                          \
  template void add_row_inplace(Matrix<T>&, const Matrix<T>&);                            \
  template Matrix<T> column_sums(const Matrix<T>&);                                       \
  template bool all_finite(const Matrix<T>&);                                             \
  template Matrix<T> uniform_fill<T>(Rng&, std::size_t, std::size_t, double, double);

SSINR_INSTANTIATE(float)
SSINR_INSTANTIATE(double)

#undef SSINR_INSTANTIATE

}  // namespace ssinr

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "ssinr/error.hpp"

namespace ssinr {

enum class Precision { Single, Double };

template <typename T>
constexpr Precision precision_of() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>,
                "Matrix supports float and double only");
  return std::is_same_v<T, float> ? Precision::Single : Precision::Double;
}

std::string to_string(Precision p);
Precision parse_precision(const std::string& text);

// 64-byte aligned storage.
inline constexpr std::size_t kStorageAlignment = 64;

template <typename T>
struct AlignedAllocator {
  using value_type = T;

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kStorageAlignment}));
  }
  void deallocate(T* p, std::size_t n) noexcept {
    ::operator delete(p, n * sizeof(T), std::align_val_t{kStorageAlignment});
  }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

/// Dense row-major matrix. Storage length is always rows * cols.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{0})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, const std::vector<T>& data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  static constexpr Precision precision() { return precision_of<T>(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::string shape_string() const;

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    std::copy(data_.begin(), data_.end(), out.data().begin());
    return out;
  }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T, AlignedAllocator<T>> data_;
};

using Matrix2D = Matrix<double>;
using MatrixF = Matrix<float>;

// Linear algebra. All operations validate shapes and throw ContractViolation
// naming both operands on mismatch. Reductions use a fixed order.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b);
// aᵀ · b
template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b);
// a · bᵀ
template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b);

template <typename T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> subtract(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> scale(const Matrix<T>& a, T factor);
// Adds a 1×cols row vector to every row of a.
template <typename T>
void add_row_inplace(Matrix<T>& a, const Matrix<T>& row);
// 1×cols column sums, accumulated top to bottom.
template <typename T>
Matrix<T> column_sums(const Matrix<T>& a);

template <typename T>
bool all_finite(const Matrix<T>& a);

/// Counter-based generator: draw i is a pure function of (key, i);
/// independent streams are derived from a seed without shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed)), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();
  // Independent stream keyed on (this stream, index); does not advance *this.
  Rng derive(std::uint64_t index) const;

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t key_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Seed for a sweep cell / trial; stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial);

// Entries uniform in [lo, hi); lo == hi yields a constant matrix.
template <typename T>
Matrix<T> uniform_fill(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi);

inline constexpr double kFiniteDiffStep = 1e-5;

/// Central-difference gradient of f at theta. Throws OracleFailure with the
/// parameter index when f returns a non-finite value.
std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> theta, double h = kFiniteDiffStep);

}  // namespace ssinr

#pragma once

#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace msnest {

using Rng = std::mt19937_64;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(e^a + e^b) without overflow; either argument may be -inf.
double log_add_exp(double a, double b);

/// ln(sum_i e^{v_i}); -inf for an empty range.
double log_sum_exp(std::span<const double> values);

/// ln(e^a - e^b) for a >= b. Returns -inf when a == b.
double log_diff_exp(double a, double b);

/// ln Gamma(x) for x > 0 using the Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);

/// Row-major K x J matrix of parameter vectors.
class PointMatrix {
 public:
  PointMatrix() = default;
  PointMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  void set_row(std::size_t i, std::span<const double> values);
  void append_row(std::span<const double> values);
  /// Removes row i by moving the last row into its slot.
  void swap_remove_row(std::size_t i);

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const PointMatrix&, const PointMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace msnest

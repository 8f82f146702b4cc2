#include "msnest/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace msnest {

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == kNegInf) return kNegInf;
  if (std::isinf(hi)) return hi;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double log_diff_exp(double a, double b) {
  if (b > a) throw std::domain_error("log_diff_exp: requires a >= b");
  if (b == kNegInf) return a;
  if (a == b) return kNegInf;
  // ln(1 - e^{-t}) evaluated on the stable branch for small and large t
  const double t = a - b;
  const double tail = t < 0.6931471805599453 ? std::log(-std::expm1(-t)) : std::log1p(-std::exp(-t));
  return a + tail;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  static constexpr double kG = 7.0;
  static constexpr double kHalfLog2Pi = 0.91893853320467274178;
  if (x < 0.5) {
    // reflection keeps the series inside its accurate range
    return std::log(M_PI / std::abs(std::sin(M_PI * x))) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double series = kCoef[0];
  for (std::size_t i = 1; i < kCoef.size(); ++i) series += kCoef[i] / (z + static_cast<double>(i));
  const double t = z + kG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

void PointMatrix::set_row(std::size_t i, std::span<const double> values) {
  if (values.size() != cols_) throw std::invalid_argument("PointMatrix::set_row: width mismatch");
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
}

void PointMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw std::invalid_argument("PointMatrix::append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void PointMatrix::swap_remove_row(std::size_t i) {
  if (i >= rows_) throw std::out_of_range("PointMatrix::swap_remove_row");
  if (i + 1 != rows_) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>((rows_ - 1) * cols_), cols_,
                data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
  data_.resize((rows_ - 1) * cols_);
  --rows_;
}

}  // namespace msnest

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "msnest/engine.hpp"
#include "msnest/numeric.hpp"

namespace msnest {

/// Normalized posterior sample set.
struct WeightedPosterior {
  PointMatrix params;
  std::vector<double> weights;  ///< non-negative, summing to 1
  std::vector<double> log_l;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct ParamSummary {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  Interval ci68;
  Interval ci95;
  Interval ci99;
  double ml_value = 0.0;  ///< value at the maximum-likelihood sample
};

/// Weights exp(log_weight - ln E) over discarded and remainder samples.
WeightedPosterior to_posterior(const NestedRun& run);

/// Concatenates runs that did not abort, each carrying 1/n of the mass.
WeightedPosterior pool_posteriors(std::span<const NestedRun> runs);

/// Smallest sample value whose cumulative weight exceeds q.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

ParamSummary summarize(const WeightedPosterior& post, std::size_t j);

struct Histogram1D {
  double low = 0.0;
  double high = 0.0;
  std::vector<double> mass;
  double out_of_range = 0.0;

  double bin_width() const { return (high - low) / static_cast<double>(mass.size()); }
  double bin_center(std::size_t b) const { return low + (static_cast<double>(b) + 0.5) * bin_width(); }
};

/// Weighted 1D histogram on [low, high]; the upper edge falls in the last bin.
Histogram1D marginal_hist(const WeightedPosterior& post, std::size_t j, std::size_t bins, double low,
                          double high);

struct Histogram2D {
  double low1 = 0.0, high1 = 0.0;
  double low2 = 0.0, high2 = 0.0;
  std::size_t bins1 = 0, bins2 = 0;
  std::vector<double> mass;  ///< row-major [bin1][bin2]
  double out_of_range = 0.0;

  double at(std::size_t b1, std::size_t b2) const { return mass[b1 * bins2 + b2]; }
};

Histogram2D joint_hist(const WeightedPosterior& post, std::size_t j1, std::size_t j2,
                       std::size_t bins1, std::size_t bins2, std::pair<double, double> range1,
                       std::pair<double, double> range2);

}  // namespace msnest

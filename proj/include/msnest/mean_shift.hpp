#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "msnest/numeric.hpp"

namespace msnest {

enum class Kernel { Flat, Gaussian };

/// Mean-shift tunables. Distances are in min-max normalized units.
struct ClusterConfig {
  Kernel kernel = Kernel::Gaussian;
  double radius = 0.6;     ///< neighbor cutoff D: only points with d < D contribute
  double bandwidth = 0.2;  ///< Gaussian length scale
  /// false: weight exp(-d / bandwidth); true: conventional exp(-d^2 / (2 bandwidth^2))
  bool squared_gaussian = false;
  std::size_t max_steps = 500;
  double shift_tol = 1e-4;
  double merge_tol = 1e-2;

  /// Throws std::invalid_argument unless 0 < radius <= sqrt(dim) and the
  /// remaining scales are positive.
  void validate(std::size_t dim) const;

  friend bool operator==(const ClusterConfig&, const ClusterConfig&) = default;
};

struct Normalization {
  PointMatrix points;          ///< coordinates mapped into [0, 1]
  std::vector<double> offset;  ///< per-dimension minimum
  std::vector<double> scale;   ///< per-dimension span; 0 for constant dimensions

  /// Maps a normalized coordinate back to physical units.
  double to_physical(std::size_t j, double value) const;
};

/// Per-dimension x' = (x - min) / (max - min); constant dimensions map to 0.5.
Normalization normalize_points(const PointMatrix& points);

/// Converged mode for every point. Each mode climbs by repeated kernel-weighted
/// means over the original (static) point set restricted to d < radius. A
/// point stops once a step moves it less than shift_tol, or after max_steps.
PointMatrix mean_shift(const PointMatrix& normalized, const ClusterConfig& config);

/// Single-linkage grouping of modes with link distance merge_tol. Labels are
/// dense, numbered by first occurrence.
std::vector<int> assign_labels(const PointMatrix& modes, double merge_tol);

/// Population standard deviation per cluster and dimension. Row c holds
/// cluster c; singleton clusters get zeros.
PointMatrix cluster_sigmas(const PointMatrix& points, std::span<const int> labels);

struct ClusterResult {
  std::vector<int> labels;
  PointMatrix modes;  ///< normalized mode of each cluster's first member
  std::vector<std::size_t> sizes;
  PointMatrix sigma;  ///< physical units, one row per cluster
};

/// normalize -> mean_shift -> assign_labels -> cluster_sigmas.
ClusterResult cluster_points(const PointMatrix& points, const ClusterConfig& config);

}  // namespace msnest

#include "msnest/mean_shift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msnest {

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;

  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

void ClusterConfig::validate(std::size_t dim) const {
  if (!(radius > 0.0) || radius > std::sqrt(static_cast<double>(dim))) {
    throw std::invalid_argument("cluster radius D must satisfy 0 < D <= sqrt(J)");
  }
  if (!(bandwidth > 0.0)) throw std::invalid_argument("cluster bandwidth must be positive");
  if (!(shift_tol > 0.0)) throw std::invalid_argument("cluster shift_tol must be positive");
  if (!(merge_tol > 0.0)) throw std::invalid_argument("cluster merge_tol must be positive");
  if (max_steps == 0) throw std::invalid_argument("cluster max_steps must be >= 1");
}

double Normalization::to_physical(std::size_t j, double value) const {
  return scale[j] > 0.0 ? offset[j] + value * scale[j] : offset[j];
}

Normalization normalize_points(const PointMatrix& points) {
  const std::size_t k = points.rows();
  const std::size_t dim = points.cols();
  if (k == 0) throw std::invalid_argument("normalize_points: no points");
  Normalization out{PointMatrix(k, dim), std::vector<double>(dim), std::vector<double>(dim)};
  for (std::size_t j = 0; j < dim; ++j) {
    double lo = points(0, j);
    double hi = points(0, j);
    for (std::size_t i = 1; i < k; ++i) {
      lo = std::min(lo, points(i, j));
      hi = std::max(hi, points(i, j));
    }
    out.offset[j] = lo;
    out.scale[j] = hi - lo;
    for (std::size_t i = 0; i < k; ++i) {
      out.points(i, j) = hi > lo ? (points(i, j) - lo) / (hi - lo) : 0.5;
    }
  }
  return out;
}

PointMatrix mean_shift(const PointMatrix& normalized, const ClusterConfig& config) {
  const std::size_t k = normalized.rows();
  const std::size_t dim = normalized.cols();
  const double radius2 = config.radius * config.radius;
  const double shift_tol2 = config.shift_tol * config.shift_tol;

  PointMatrix modes = normalized;
  std::vector<char> active(k, 1);
  std::vector<double> next(dim);
  std::size_t n_active = k;

  for (std::size_t step = 0; step < config.max_steps && n_active > 0; ++step) {
    // each mode update reads only the static point set, so order is irrelevant
    for (std::size_t i = 0; i < k; ++i) {
      if (!active[i]) continue;
      const auto mode = modes.row(i);
      std::fill(next.begin(), next.end(), 0.0);
      double total = 0.0;
      for (std::size_t n = 0; n < k; ++n) {
        const auto x = normalized.row(n);
        double d2 = 0.0;
        for (std::size_t j = 0; j < dim && d2 < radius2; ++j) {
          const double diff = x[j] - mode[j];
          d2 += diff * diff;
        }
        if (!(d2 < radius2)) continue;
        double w = 1.0;
        if (config.kernel == Kernel::Gaussian) {
          w = config.squared_gaussian ? std::exp(-d2 / (2.0 * config.bandwidth * config.bandwidth))
                                      : std::exp(-std::sqrt(d2) / config.bandwidth);
        }
        total += w;
        for (std::size_t j = 0; j < dim; ++j) next[j] += w * x[j];
      }
      if (!(total > 0.0)) {
        // isolated: the mode stays where it is
        active[i] = 0;
        --n_active;
        continue;
      }
      double moved2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double updated = next[j] / total;
        const double diff = updated - mode[j];
        moved2 += diff * diff;
        mode[j] = updated;
      }
      if (moved2 < shift_tol2) {
        active[i] = 0;
        --n_active;
      }
    }
  }
  return modes;
}

std::vector<int> assign_labels(const PointMatrix& modes, double merge_tol) {
  const std::size_t k = modes.rows();
  const std::size_t dim = modes.cols();
  const double tol2 = merge_tol * merge_tol;
  DisjointSet sets(k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < dim && d2 <= tol2; ++j) {
        const double diff = modes(a, j) - modes(b, j);
        d2 += diff * diff;
      }
      if (d2 <= tol2) sets.unite(a, b);
    }
  }
  std::vector<int> labels(k, -1);
  std::vector<int> root_label(k, -1);
  int next = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t root = sets.find(i);
    if (root_label[root] < 0) root_label[root] = next++;
    labels[i] = root_label[root];
  }
  return labels;
}

PointMatrix cluster_sigmas(const PointMatrix& points, std::span<const int> labels) {
  if (labels.size() != points.rows()) {
    throw std::invalid_argument("cluster_sigmas: one label per point required");
  }
  const std::size_t dim = points.cols();
  const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (std::any_of(labels.begin(), labels.end(), [](int l) { return l < 0; })) {
    throw std::invalid_argument("cluster_sigmas: negative label");
  }
  const auto nc = static_cast<std::size_t>(n_clusters);
  PointMatrix mean(nc, dim);
  PointMatrix sigma(nc, dim);
  std::vector<std::size_t> count(nc, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    ++count[c];
    for (std::size_t j = 0; j < dim; ++j) mean(c, j) += points(i, j);
  }
  for (std::size_t c = 0; c < nc; ++c) {
    if (count[c] == 0) throw std::invalid_argument("cluster_sigmas: labels are not dense");
    for (std::size_t j = 0; j < dim; ++j) mean(c, j) /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = points(i, j) - mean(c, j);
      sigma(c, j) += d * d;
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t j = 0; j < dim; ++j) {
      sigma(c, j) = std::sqrt(sigma(c, j) / static_cast<double>(count[c]));
    }
  }
  return sigma;
}

ClusterResult cluster_points(const PointMatrix& points, const ClusterConfig& config) {
  config.validate(points.cols());
  const Normalization norm = normalize_points(points);
  const PointMatrix modes = mean_shift(norm.points, config);

  ClusterResult result;
  result.labels = assign_labels(modes, config.merge_tol);
  const int n_clusters = *std::max_element(result.labels.begin(), result.labels.end()) + 1;
  result.sizes.assign(static_cast<std::size_t>(n_clusters), 0);
  result.modes = PointMatrix(static_cast<std::size_t>(n_clusters), points.cols());
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(result.labels[i]);
    if (result.sizes[c]++ == 0) result.modes.set_row(c, modes.row(i));
  }
  result.sigma = cluster_sigmas(points, result.labels);
  return result;
}

}  // namespace msnest

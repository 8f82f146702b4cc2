#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "msnest/model.hpp"
#include "msnest/numeric.hpp"

namespace msnest {

/// The current live points with their log-likelihoods and optional cluster
/// labels. Spread statistics are computed on demand from the current points.
class LivePointSet {
 public:
  explicit LivePointSet(std::size_t dim) : points_(0, dim) {}

  std::size_t size() const { return log_l_.size(); }
  std::size_t dim() const { return points_.cols(); }
  const PointMatrix& points() const { return points_; }
  std::span<const double> point(std::size_t i) const { return points_.row(i); }
  double log_l(std::size_t i) const { return log_l_[i]; }
  const std::vector<double>& log_ls() const { return log_l_; }

  bool has_labels() const { return !labels_.empty(); }
  int label(std::size_t i) const { return labels_.empty() ? -1 : labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  /// Replaces all labels (one per point) or clears them when empty.
  void set_labels(std::vector<int> labels);

  /// Appends a point. label must be >= 0 exactly when labels are present.
  void add(std::span<const double> point, double log_l, int label = -1);
  /// Removes point i; the last point takes its index.
  void remove(std::size_t i);

  std::size_t worst_index() const;
  double max_log_l() const;

  /// Population standard deviation per dimension over all points.
  std::vector<double> sigma() const;
  std::vector<double> barycenter() const;
  /// Population standard deviation over the members of cluster c.
  std::vector<double> cluster_sigma(int c) const;
  /// Step scale for a walk starting at point i: its cluster sigma when
  /// labels exist, with zero components falling back to the global sigma.
  std::vector<double> walk_sigma(std::size_t i) const;

 private:
  PointMatrix points_;
  std::vector<double> log_l_;
  std::vector<int> labels_;
};

/// Walk and rescue tunables.
struct WalkParams {
  std::size_t steps = 20;               ///< N accepted steps per walk
  double step_factor = 0.2;             ///< f
  std::size_t tries_per_cycle = 200;    ///< N_t
  std::size_t cycles_per_cluster = 2;   ///< NN_t
  std::size_t try_budget = 40000;       ///< abort after this many walk tries
  bool clustering = false;
};

struct StrategyEvents {
  std::size_t recenter = 0;
  std::size_t synthesize = 0;
  std::size_t cluster = 0;
};

struct WalkOutcome {
  std::vector<double> point;
  double log_l = kNegInf;
  std::size_t tries = 0;            ///< walk proposals, accepted or not
  std::size_t rescue_evaluations = 0;
  StrategyEvents events;
  int label = -1;                   ///< cluster of the walk's origin, -1 without labels
};

/// No replacement found within the try budget.
class ReplacementFailure : public std::runtime_error {
 public:
  ReplacementFailure(const std::string& what, std::size_t tries, StrategyEvents events)
      : std::runtime_error(what), tries_(tries), events_(events) {}
  std::size_t tries() const { return tries_; }
  const StrategyEvents& events() const { return events_; }

 private:
  std::size_t tries_;
  StrategyEvents events_;
};

/// current + f * r * sigma with r_j uniform on [-1, 1].
std::vector<double> propose_step(std::span<const double> current, double step_factor,
                                 std::span<const double> sigma, Rng& rng);

struct WalkResult {
  bool accepted = false;
  std::vector<double> point;        ///< endpoint (accepted) or last accepted chain point
  double log_l = kNegInf;
  std::vector<double> last_failed;  ///< most recent rejected candidate, empty if none
  std::size_t tries = 0;
};

/// Lawn-mower random walk: N steps that each keep log L > threshold. Rejected
/// or out-of-box candidates redraw r and count as tries; gives up once tries
/// reach try_budget.
WalkResult lawn_mower_walk(std::span<const double> start, double start_log_l, double threshold,
                           std::size_t steps, double step_factor, std::span<const double> sigma,
                           const Problem& problem, Rng& rng, std::size_t try_budget);

/// barycenter + u (failed - barycenter).
std::vector<double> recenter_at(std::span<const double> failed, std::span<const double> barycenter,
                                double u);
/// recenter_at with u uniform on [0, 1].
std::vector<double> strategy_recenter(std::span<const double> failed,
                                      std::span<const double> barycenter, Rng& rng);

/// Each coordinate copied from an independently chosen live point.
std::vector<double> strategy_synthesize(const LivePointSet& live, Rng& rng);

/// Returns one label per live point.
using ClusterHook = std::function<std::vector<int>(const PointMatrix&)>;

/// Finds a replacement live point with log L > threshold.
///
/// Walks start from a random live point. Every time a walk exhausts
/// tries_per_cycle tries, one of the two rescue strategies is chosen with
/// equal odds; an accepted rescue candidate seeds the next walk, otherwise a
/// new random live point does. With clustering enabled, every
/// cycles_per_cluster exhaustions the hook relabels the live set instead and
/// walks restart with their cluster's sigma. Throws ReplacementFailure once
/// try_budget walk tries are spent.
WalkOutcome find_new_point(LivePointSet& live, double threshold, const WalkParams& params,
                           const Problem& problem, const ClusterHook& cluster, Rng& rng);

}  // namespace msnest

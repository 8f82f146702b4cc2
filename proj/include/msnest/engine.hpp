#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msnest/mean_shift.hpp"
#include "msnest/model.hpp"
#include "msnest/walker.hpp"

namespace msnest {

enum class Quadrature { Rectangle, Trapezoid };

struct SamplerConfig {
  std::size_t live_points = 1000;        ///< K
  std::size_t walk_steps = 20;           ///< N
  double step_factor = 0.2;              ///< f
  std::size_t tries_per_cycle = 200;     ///< N_t
  std::size_t cycles_per_cluster = 2;    ///< NN_t
  Quadrature quadrature = Quadrature::Trapezoid;
  double term_eps = 1e-5;
  std::size_t max_iter = 10'000'000;
  std::size_t n_runs = 16;
  std::uint64_t seed = 1;
  /// Walk tries allowed per replacement; 0 means 100 * N_t * NN_t.
  std::size_t try_budget = 0;
  /// Mean-shift clustering of the live points; disabled when empty.
  std::optional<ClusterConfig> clustering = ClusterConfig{};

  /// Throws std::invalid_argument on any violated bound.
  void validate(std::size_t dim) const;
  /// Non-fatal tuning advice, e.g. f * N < 1.
  std::vector<std::string> warnings() const;
  WalkParams walk_params() const;

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

/// One nested-sampling record: a discarded point, or a final live point
/// standing in for the remaining prior volume.
struct DiscardedSample {
  std::vector<double> params;
  double log_l = kNegInf;
  double log_x = 0.0;
  double log_dx = kNegInf;
  double log_weight = kNegInf;  ///< log_l + log_dx
};

enum class RunStatus { Converged, MaxIterations, Aborted };

struct NestedRun {
  double log_evidence = kNegInf;
  std::size_t log_evidence_terms = 0;
  double information = 0.0;  ///< H in nats
  double complexity = 0.0;
  std::vector<DiscardedSample> samples;    ///< discarded points, in order
  std::vector<DiscardedSample> remainder;  ///< final live points
  std::size_t iterations = 0;              ///< M
  std::size_t cluster_invocations = 0;
  std::size_t total_tries = 0;
  std::size_t rescue_evaluations = 0;
  std::size_t recenter_events = 0;
  std::size_t synthesize_events = 0;
  std::size_t constraint_violations = 0;  ///< replacements with log L <= threshold
  std::size_t out_of_bounds = 0;          ///< replacements outside the prior box
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Converged;
  std::string diagnostic;
  double cpu_seconds = 0.0;
};

/// -m / K: logarithm of the expected prior volume after m discards.
double shrinkage_log_volume(std::size_t m, std::size_t live_points);

struct ChainPoint {
  double log_l;
  double log_x;
};

/// Volume left under the live points when the run stops.
struct LiveRemainder {
  double log_x = kNegInf;
  double log_mean_l = kNegInf;  ///< ln of the mean live likelihood
};

struct EvidenceSum {
  double log_evidence = kNegInf;
  std::vector<double> log_dx;  ///< one per chain point
  double log_remainder = kNegInf;
};

/// Quadrature over the discarded chain (X_0 = 1) plus the live remainder
/// X_M * mean(L_live). Rectangle: dX_m = X_{m-1} - X_m. Trapezoid:
/// dX_m = (X_{m-1} - X_{m+1}) / 2 with X_{M+1} = X_M, and the first sample
/// also covers [X_1, X_0] so the weights still sum to one. Throws
/// std::invalid_argument unless log_x is strictly decreasing.
EvidenceSum accumulate_evidence(std::span<const ChainPoint> chain, Quadrature rule,
                                const LiveRemainder& remainder);

/// H = sum_m p_m (ln L_m - ln E), p_m = exp(log_weight_m - ln E); clipped to
/// zero when negative by less than 1e-9.
double information_gain(std::span<const double> log_l, std::span<const double> log_weight,
                        double log_evidence);

/// C = -2 (<ln L>_posterior - ln L_max).
double bayesian_complexity(std::span<const double> log_l, std::span<const double> log_weight,
                           double log_evidence, double log_l_max);

/// Runs one nested-sampling analysis with the given seed.
NestedRun run_nested(const Problem& problem, const SamplerConfig& config, std::uint64_t seed);

/// config.n_runs independent runs seeded config.seed + i, dispatched over
/// worker threads; results are ordered by run index.
std::vector<NestedRun> run_many(const Problem& problem, const SamplerConfig& config,
                                std::size_t threads = 0);

struct CombinedEvidence {
  double mean_log_evidence = kNegInf;
  std::optional<double> delta_log_evidence;  ///< sample std; empty with < 2 runs
  std::vector<double> per_run;               ///< ln E of usable runs
  std::size_t usable_runs = 0;
};

/// Mean and sample standard deviation of ln E over runs that did not abort.
CombinedEvidence combine_runs(std::span<const NestedRun> runs);

}  // namespace msnest

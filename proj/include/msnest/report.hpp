#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msnest/engine.hpp"
#include "msnest/posterior.hpp"

namespace msnest {

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Converged;
  std::string diagnostic;
  double log_evidence = kNegInf;
  double information = 0.0;
  double complexity = 0.0;
  std::size_t iterations = 0;
  std::size_t total_tries = 0;
  std::size_t cluster_invocations = 0;
  double cpu_seconds = 0.0;
};

/// Aggregate of all runs of one analysis. Optional fields print as `null`.
struct ResultsReport {
  std::optional<double> mean_log_evidence;
  std::optional<double> delta_log_evidence;
  std::optional<double> information;   ///< mean over usable runs
  std::optional<double> complexity;    ///< mean over usable runs
  std::optional<double> sqrt_h_over_k; ///< theoretical ln E spread
  std::vector<RunRecord> runs;
  std::vector<std::string> param_names;
  std::vector<std::optional<ParamSummary>> summaries;
  std::size_t iterations = 0;
  std::size_t total_tries = 0;
  std::size_t cluster_invocations = 0;
  std::size_t constraint_violations = 0;
  std::size_t out_of_bounds = 0;
  std::size_t failed_runs = 0;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;
  std::vector<std::string> warnings;
};

const char* to_string(RunStatus status);

ResultsReport build_report(std::span<const NestedRun> runs, const std::vector<std::string>& names,
                           std::size_t live_points, double wall_seconds);

/// `key: value` lines with stable keys.
std::string format_results(const ResultsReport& report);

/// `weight logL p1 .. pJ` per row, full precision.
std::string format_posterior_samples(const WeightedPosterior& post);

/// results.txt, posterior_samples.dat, summary.csv, hist_<name>.dat and
/// trace.csv inside dir (created if missing). Histograms use the prior box.
void write_outputs(const std::filesystem::path& dir, const ResultsReport& report,
                   std::span<const NestedRun> runs, const ParameterSpace& space,
                   std::size_t hist_bins);

struct PowerLawFit {
  bool available = false;
  double exponent = 0.0;
  double prefactor = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (ln x, ln y); skips non-positive values.
/// Unavailable with fewer than two usable points.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct KScanRow {
  std::size_t live_points = 0;
  std::optional<double> mean_log_evidence;
  std::optional<double> delta_log_evidence;
  double mean_information = 0.0;
  double sqrt_h_over_k = 0.0;
  double cpu_seconds = 0.0;  ///< mean per run
  std::size_t failed_runs = 0;
};

struct KScanResult {
  std::vector<KScanRow> rows;
  PowerLawFit delta_fit;
  PowerLawFit cpu_fit;
};

/// Fits delta(ln E) and CPU time against K from already computed rows;
/// the exclusion lists drop K values from the respective fit.
KScanResult fit_kscan(std::vector<KScanRow> rows, std::span<const std::size_t> exclude_delta,
                      std::span<const std::size_t> exclude_cpu);

KScanRow summarize_k(std::span<const NestedRun> runs, std::size_t live_points);

/// Runs the analysis for every K in ks (n_runs each) and fits power laws.
/// Throws std::invalid_argument with fewer than three K values.
KScanResult kscan(const Problem& problem, const SamplerConfig& base, std::span<const std::size_t> ks,
                  std::span<const std::size_t> exclude_delta, std::span<const std::size_t> exclude_cpu);

std::string format_kscan(const KScanResult& result);

}  // namespace msnest

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msnest/engine.hpp"
#include "msnest/mean_shift.hpp"
#include "msnest/model.hpp"

namespace msnest {

/// Which likelihood a run configuration builds. The two spectral families fit
/// a dataset; the analytic targets need no data and have known evidence.
enum class ModelKind { GaussPeaks, ModulatedDecay, GaussianTarget, Constant };

struct ParamBounds {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;

  friend bool operator==(const ParamBounds&, const ParamBounds&) = default;
};

/// Synthetic data generation: model_eval(truth) on an evenly spaced grid plus
/// Poisson or Gaussian noise.
struct SimulateSpec {
  std::vector<double> truth;
  double grid_low = 0.0;
  double grid_high = 1.0;
  std::size_t grid_points = 100;
  double yerr = 1.0;  ///< Gaussian-error data only
  std::uint64_t seed = 1;

  friend bool operator==(const SimulateSpec&, const SimulateSpec&) = default;
};

/// Everything a `run`, `simulate` or `kscan` invocation needs.
///
/// File format: one `key = value` per line, `#` starts a comment, and each
/// parameter is declared as `param <name> <min> <max>` in layout order.
struct RunConfig {
  ModelKind model = ModelKind::GaussPeaks;
  std::size_t n_peaks = 1;
  std::vector<double> target_mean;
  std::vector<double> target_sigma;
  double constant_log_l = 0.0;

  std::string data_path;
  DataKind data_kind = DataKind::Counts;
  std::optional<SimulateSpec> simulate;
  std::vector<ParamBounds> params;

  SamplerConfig sampler;  ///< sampler.clustering is rebuilt by sampler_config()
  bool clustering = true;
  ClusterConfig cluster;

  std::size_t hist_bins = 50;
  std::string output_dir = "msnest_out";

  /// Directory relative data paths resolve against; not serialized.
  std::filesystem::path base_dir;

  ParameterSpace space() const;
  SamplerConfig sampler_config() const;
  /// Spectral families only.
  ModelSpec model_spec() const;
  bool needs_data() const { return model == ModelKind::GaussPeaks || model == ModelKind::ModulatedDecay; }
  std::filesystem::path resolved_data_path() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// All problems found while reading or validating a configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Canonical text form: every key in a fixed order, doubles in shortest
/// round-trip notation. parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Non-fatal advice (walk reach f*N < 1).
std::vector<std::string> config_warnings(const RunConfig& config);

/// Loads the dataset named by the config, or simulates it when only a
/// simulate spec is given.
Dataset load_dataset(const RunConfig& config);

/// Prior box plus likelihood for the configured model.
Problem make_problem(const RunConfig& config, const std::optional<Dataset>& data);

}  // namespace msnest

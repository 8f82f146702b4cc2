#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msnest/numeric.hpp"

namespace msnest {

/// Parameter vector does not match the model family layout.
struct LayoutError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-finite or otherwise unusable input, distinct from a -inf likelihood.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Box-shaped uniform prior over J named parameters.
class ParameterSpace {
 public:
  ParameterSpace(std::vector<std::string> names, std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double width(std::size_t j) const { return upper_[j] - lower_[j]; }

  /// Closed-box membership test.
  bool contains(std::span<const double> point) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Independent uniform draw inside the prior box.
std::vector<double> sample_prior(const ParameterSpace& space, Rng& rng);

enum class DataKind { Counts, GaussianErrors };

/// A spectrum: (channel, counts) or (abscissa, value, uncertainty).
class Dataset {
 public:
  static Dataset counts(std::vector<double> x, std::vector<double> y);
  static Dataset gaussian(std::vector<double> x, std::vector<double> y, std::vector<double> yerr);

  DataKind kind() const { return kind_; }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  /// Empty for count data.
  const std::vector<double>& yerr() const { return yerr_; }

  /// Sum of the parameter-independent likelihood terms: -sum ln(y!) for
  /// counts, -sum ln(yerr*sqrt(2 pi)) for Gaussian errors.
  double log_normalization() const { return log_norm_; }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.kind_ == b.kind_ && a.x_ == b.x_ && a.y_ == b.y_ && a.yerr_ == b.yerr_;
  }

 private:
  Dataset() = default;

  DataKind kind_ = DataKind::Counts;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> yerr_;
  double log_norm_ = 0.0;
};

enum class ModelFamily { GaussPeaksFlatBg, ModulatedExpDecay };

/// Spectral model families and their fixed parameter layouts.
///
/// GaussPeaksFlatBg(n): [bg, width, pos_1..pos_n, amp_1..amp_n]
///   f(x) = bg + sum_k amp_k exp(-(x - pos_k)^2 / (2 width^2))
/// ModulatedExpDecay:   [norm, lifetime, rel_amplitude, pulsation, phase]
///   f(t) = norm exp(-t/lifetime) (1 + rel_amplitude cos(pulsation t + phase))
///
/// Positions precede amplitudes so the n! permutation modes of the peak
/// model are laid out identically in every run.
struct ModelSpec {
  ModelFamily family = ModelFamily::GaussPeaksFlatBg;
  std::size_t n_peaks = 1;

  static ModelSpec gauss_peaks(std::size_t n) { return {ModelFamily::GaussPeaksFlatBg, n}; }
  static ModelSpec modulated_decay() { return {ModelFamily::ModulatedExpDecay, 0}; }

  std::size_t param_count() const;
  std::vector<std::string> default_names() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Model prediction at each abscissa value. Throws LayoutError.
std::vector<double> model_eval(const ModelSpec& spec, std::span<const double> params,
                               std::span<const double> x);

/// Poisson or Gaussian log-likelihood including all constant terms.
/// Returns -inf when a count channel with y > 0 has a prediction <= 0.
/// Throws InputError for non-finite parameters and LayoutError on size mismatch.
double log_likelihood(const ModelSpec& spec, std::span<const double> params, const Dataset& data);

using LogLikelihoodFn = std::function<double(std::span<const double>)>;

/// Binds a model family to a dataset.
LogLikelihoodFn make_log_likelihood(const ModelSpec& spec, Dataset data);

/// Analytic separable normal likelihood prod_j N(a_j; mean_j, sigma_j).
LogLikelihoodFn gaussian_target(std::vector<double> mean, std::vector<double> sigma);

/// Likelihood identically equal to e^{log_c}.
LogLikelihoodFn constant_target(double log_c);

/// A prior box together with the likelihood to integrate against it.
struct Problem {
  ParameterSpace space;
  LogLikelihoodFn log_l;
};

}  // namespace msnest

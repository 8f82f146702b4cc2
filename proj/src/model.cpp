#include "msnest/model.hpp"

#include <cmath>
#include <sstream>

namespace msnest {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void check_layout(const ModelSpec& spec, std::span<const double> params) {
  if (params.size() != spec.param_count()) {
    std::ostringstream msg;
    msg << "model expects " << spec.param_count() << " parameters, got " << params.size();
    throw LayoutError(msg.str());
  }
}

// Prediction at a single abscissa; params already layout-checked.
double predict(const ModelSpec& spec, std::span<const double> p, double x) {
  if (spec.family == ModelFamily::GaussPeaksFlatBg) {
    const std::size_t n = spec.n_peaks;
    const double inv_two_w2 = 1.0 / (2.0 * p[1] * p[1]);
    double value = p[0];
    for (std::size_t k = 0; k < n; ++k) {
      const double d = x - p[2 + k];
      value += p[2 + n + k] * std::exp(-d * d * inv_two_w2);
    }
    return value;
  }
  return p[0] * std::exp(-x / p[1]) * (1.0 + p[2] * std::cos(p[3] * x + p[4]));
}

}  // namespace

ParameterSpace::ParameterSpace(std::vector<std::string> names, std::vector<double> lower,
                               std::vector<double> upper)
    : names_(std::move(names)), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw std::invalid_argument("ParameterSpace: at least one parameter required");
  if (lower_.size() != upper_.size() || names_.size() != lower_.size()) {
    throw std::invalid_argument("ParameterSpace: names, lower and upper must have equal length");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j])) {
      throw std::invalid_argument("ParameterSpace: bounds for '" + names_[j] +
                                  "' must be finite with lower < upper");
    }
  }
}

bool ParameterSpace::contains(std::span<const double> point) const {
  if (point.size() != dim()) return false;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (!(point[j] >= lower_[j] && point[j] <= upper_[j])) return false;
  }
  return true;
}

std::vector<double> sample_prior(const ParameterSpace& space, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> point(space.dim());
  for (std::size_t j = 0; j < point.size(); ++j) {
    point[j] = space.lower()[j] + unit(rng) * space.width(j);
  }
  return point;
}

Dataset Dataset::counts(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || x.size() != y.size()) {
    throw InputError("count dataset: x and y must be non-empty with equal length");
  }
  Dataset d;
  d.kind_ = DataKind::Counts;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0) || std::floor(y[i]) != y[i]) {
      throw InputError("count dataset: y[" + std::to_string(i) + "] is not a non-negative integer");
    }
    d.log_norm_ -= log_gamma(y[i] + 1.0);
  }
  d.x_ = std::move(x);
  d.y_ = std::move(y);
  return d;
}

Dataset Dataset::gaussian(std::vector<double> x, std::vector<double> y, std::vector<double> yerr) {
  if (x.empty() || x.size() != y.size() || y.size() != yerr.size()) {
    throw InputError("gaussian dataset: x, y and yerr must be non-empty with equal length");
  }
  Dataset d;
  d.kind_ = DataKind::GaussianErrors;
  for (std::size_t i = 0; i < yerr.size(); ++i) {
    if (!(yerr[i] > 0.0) || !std::isfinite(yerr[i])) {
      throw InputError("gaussian dataset: yerr[" + std::to_string(i) + "] must be positive");
    }
    d.log_norm_ -= std::log(yerr[i]) + kHalfLog2Pi;
  }
  d.x_ = std::move(x);
  d.y_ = std::move(y);
  d.yerr_ = std::move(yerr);
  return d;
}

std::size_t ModelSpec::param_count() const {
  return family == ModelFamily::GaussPeaksFlatBg ? 2 + 2 * n_peaks : 5;
}

std::vector<std::string> ModelSpec::default_names() const {
  if (family == ModelFamily::ModulatedExpDecay) {
    return {"norm", "lifetime", "rel_amplitude", "pulsation", "phase"};
  }
  std::vector<std::string> names = {"bg", "width"};
  for (std::size_t k = 1; k <= n_peaks; ++k) names.push_back("pos" + std::to_string(k));
  for (std::size_t k = 1; k <= n_peaks; ++k) names.push_back("amp" + std::to_string(k));
  return names;
}

std::vector<double> model_eval(const ModelSpec& spec, std::span<const double> params,
                               std::span<const double> x) {
  check_layout(spec, params);
  if (spec.family == ModelFamily::GaussPeaksFlatBg && !(params[1] > 0.0)) {
    throw LayoutError("gauss peaks: width must be positive");
  }
  if (spec.family == ModelFamily::ModulatedExpDecay && !(params[1] > 0.0)) {
    throw LayoutError("modulated decay: lifetime must be positive");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = predict(spec, params, x[i]);
  return out;
}

double log_likelihood(const ModelSpec& spec, std::span<const double> params, const Dataset& data) {
  check_layout(spec, params);
  for (double v : params) {
    if (!std::isfinite(v)) throw InputError("log_likelihood: non-finite parameter");
  }
  if (!(params[1] > 0.0)) throw InputError("log_likelihood: width/lifetime must be positive");

  const auto& x = data.x();
  const auto& y = data.y();
  double acc = data.log_normalization();
  if (data.kind() == DataKind::Counts) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lambda = predict(spec, params, x[i]);
      if (y[i] > 0.0) {
        if (!(lambda > 0.0)) return kNegInf;
        acc += y[i] * std::log(lambda) - lambda;
      } else {
        // y = 0 contributes -lambda; lambda = 0 contributes nothing
        if (lambda < 0.0) return kNegInf;
        acc -= lambda;
      }
    }
  } else {
    const auto& err = data.yerr();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = (y[i] - predict(spec, params, x[i])) / err[i];
      acc -= 0.5 * r * r;
    }
  }
  return acc;
}

LogLikelihoodFn make_log_likelihood(const ModelSpec& spec, Dataset data) {
  auto shared = std::make_shared<const Dataset>(std::move(data));
  return [spec, shared](std::span<const double> p) { return log_likelihood(spec, p, *shared); };
}

LogLikelihoodFn gaussian_target(std::vector<double> mean, std::vector<double> sigma) {
  if (mean.empty() || mean.size() != sigma.size()) {
    throw InputError("gaussian_target: mean and sigma must be non-empty with equal length");
  }
  double log_norm = 0.0;
  for (double s : sigma) {
    if (!(s > 0.0)) throw InputError("gaussian_target: sigma must be positive");
    log_norm -= std::log(s) + kHalfLog2Pi;
  }
  return [mean = std::move(mean), sigma = std::move(sigma), log_norm](std::span<const double> p) {
    if (p.size() != mean.size()) throw LayoutError("gaussian_target: dimension mismatch");
    double acc = log_norm;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double z = (p[j] - mean[j]) / sigma[j];
      acc -= 0.5 * z * z;
    }
    return acc;
  };
}

LogLikelihoodFn constant_target(double log_c) {
  if (!std::isfinite(log_c)) throw InputError("constant_target: log_c must be finite");
  return [log_c](std::span<const double>) { return log_c; };
}

}  // namespace msnest

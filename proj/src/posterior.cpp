#include "msnest/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msnest {

namespace {

void append_run(WeightedPosterior& post, const NestedRun& run, double scale) {
  if (!std::isfinite(run.log_evidence)) {
    throw std::invalid_argument("to_posterior: run has no finite evidence");
  }
  const std::size_t first = post.weights.size();
  double total = 0.0;
  for (const auto* group : {&run.samples, &run.remainder}) {
    for (const auto& s : *group) {
      post.params.append_row(s.params);
      const double w = std::exp(s.log_weight - run.log_evidence);
      post.weights.push_back(w);
      post.log_l.push_back(s.log_l);
      total += w;
    }
  }
  for (std::size_t i = first; i < post.weights.size(); ++i) post.weights[i] *= scale / total;
}

}  // namespace

WeightedPosterior to_posterior(const NestedRun& run) {
  WeightedPosterior post;
  append_run(post, run, 1.0);
  return post;
}

WeightedPosterior pool_posteriors(std::span<const NestedRun> runs) {
  const auto usable = static_cast<std::size_t>(std::count_if(
      runs.begin(), runs.end(), [](const NestedRun& r) { return r.status != RunStatus::Aborted; }));
  if (usable == 0) throw std::invalid_argument("pool_posteriors: no usable runs");
  WeightedPosterior post;
  for (const auto& r : runs) {
    if (r.status != RunStatus::Aborted) append_run(post, r, 1.0 / static_cast<double>(usable));
  }
  return post;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  if (values.empty() || values.size() != weights.size()) {
    throw std::invalid_argument("weighted_quantile: values and weights must be non-empty and aligned");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weights[i];
    if (cumulative > q) return values[i];
  }
  return values[order.back()];
}

ParamSummary summarize(const WeightedPosterior& post, std::size_t j) {
  if (j >= post.params.cols()) throw std::out_of_range("summarize: parameter index out of range");
  const std::size_t n = post.weights.size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = post.params(i, j);

  ParamSummary s;
  for (std::size_t i = 0; i < n; ++i) s.mean += post.weights[i] * values[i];
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += post.weights[i] * (values[i] - s.mean) * (values[i] - s.mean);
  s.std = std::sqrt(var);
  s.median = weighted_quantile(values, post.weights, 0.5);
  auto central = [&](double gamma) {
    return Interval{weighted_quantile(values, post.weights, 0.5 * (1.0 - gamma)),
                    weighted_quantile(values, post.weights, 0.5 * (1.0 + gamma))};
  };
  s.ci68 = central(0.68);
  s.ci95 = central(0.95);
  s.ci99 = central(0.99);
  const auto best = std::max_element(post.log_l.begin(), post.log_l.end()) - post.log_l.begin();
  s.ml_value = values[static_cast<std::size_t>(best)];
  return s;
}

namespace {

// Bin index for x in [low, high], or -1 when outside.
long bin_of(double x, double low, double high, std::size_t bins) {
  if (!(x >= low && x <= high)) return -1;
  const auto b = static_cast<long>((x - low) / (high - low) * static_cast<double>(bins));
  return std::min(b, static_cast<long>(bins) - 1);
}

}  // namespace

Histogram1D marginal_hist(const WeightedPosterior& post, std::size_t j, std::size_t bins, double low,
                          double high) {
  if (bins < 1) throw std::invalid_argument("marginal_hist: bins must be >= 1");
  if (!(high > low)) throw std::invalid_argument("marginal_hist: zero-width range");
  Histogram1D h{low, high, std::vector<double>(bins, 0.0), 0.0};
  for (std::size_t i = 0; i < post.weights.size(); ++i) {
    const long b = bin_of(post.params(i, j), low, high, bins);
    if (b < 0) {
      h.out_of_range += post.weights[i];
    } else {
      h.mass[static_cast<std::size_t>(b)] += post.weights[i];
    }
  }
  return h;
}

Histogram2D joint_hist(const WeightedPosterior& post, std::size_t j1, std::size_t j2,
                       std::size_t bins1, std::size_t bins2, std::pair<double, double> range1,
                       std::pair<double, double> range2) {
  if (bins1 < 1 || bins2 < 1) throw std::invalid_argument("joint_hist: bins must be >= 1");
  if (!(range1.second > range1.first) || !(range2.second > range2.first)) {
    throw std::invalid_argument("joint_hist: zero-width range");
  }
  Histogram2D h;
  h.low1 = range1.first;
  h.high1 = range1.second;
  h.low2 = range2.first;
  h.high2 = range2.second;
  h.bins1 = bins1;
  h.bins2 = bins2;
  h.mass.assign(bins1 * bins2, 0.0);
  for (std::size_t i = 0; i < post.weights.size(); ++i) {
    const long b1 = bin_of(post.params(i, j1), h.low1, h.high1, bins1);
    const long b2 = bin_of(post.params(i, j2), h.low2, h.high2, bins2);
    if (b1 < 0 || b2 < 0) {
      h.out_of_range += post.weights[i];
    } else {
      h.mass[static_cast<std::size_t>(b1) * bins2 + static_cast<std::size_t>(b2)] += post.weights[i];
    }
  }
  return h;
}

}  // namespace msnest

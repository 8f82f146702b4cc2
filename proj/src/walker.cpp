#include "msnest/walker.hpp"

#include <algorithm>
#include <cmath>

namespace msnest {

void LivePointSet::set_labels(std::vector<int> labels) {
  if (!labels.empty() && labels.size() != size()) {
    throw std::invalid_argument("LivePointSet::set_labels: one label per live point required");
  }
  labels_ = std::move(labels);
}

void LivePointSet::add(std::span<const double> point, double log_l, int label) {
  if (has_labels() != (label >= 0) && size() > 0) {
    throw std::invalid_argument("LivePointSet::add: label presence must match the set");
  }
  points_.append_row(point);
  log_l_.push_back(log_l);
  if (label >= 0) labels_.push_back(label);
}

void LivePointSet::remove(std::size_t i) {
  points_.swap_remove_row(i);
  log_l_[i] = log_l_.back();
  log_l_.pop_back();
  if (!labels_.empty()) {
    labels_[i] = labels_.back();
    labels_.pop_back();
  }
}

std::size_t LivePointSet::worst_index() const {
  return static_cast<std::size_t>(std::min_element(log_l_.begin(), log_l_.end()) - log_l_.begin());
}

double LivePointSet::max_log_l() const { return *std::max_element(log_l_.begin(), log_l_.end()); }

std::vector<double> LivePointSet::barycenter() const {
  std::vector<double> mean(dim(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) mean[j] += points_(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(size());
  return mean;
}

namespace {

std::vector<double> spread(const PointMatrix& points, const std::vector<int>& labels, int c) {
  const std::size_t dim = points.cols();
  std::vector<double> mean(dim, 0.0);
  std::vector<double> var(dim, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (c >= 0 && labels[i] != c) continue;
    ++count;
    for (std::size_t j = 0; j < dim; ++j) mean[j] += points(i, j);
  }
  if (count == 0) return var;
  for (double& m : mean) m /= static_cast<double>(count);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (c >= 0 && labels[i] != c) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = points(i, j) - mean[j];
      var[j] += d * d;
    }
  }
  for (double& v : var) v = std::sqrt(v / static_cast<double>(count));
  return var;
}

}  // namespace

std::vector<double> LivePointSet::sigma() const { return spread(points_, labels_, -1); }

std::vector<double> LivePointSet::cluster_sigma(int c) const {
  if (!has_labels()) throw std::logic_error("LivePointSet::cluster_sigma: no labels");
  return spread(points_, labels_, c);
}

std::vector<double> LivePointSet::walk_sigma(std::size_t i) const {
  std::vector<double> global = sigma();
  if (!has_labels()) return global;
  std::vector<double> local = cluster_sigma(labels_[i]);
  for (std::size_t j = 0; j < local.size(); ++j) {
    if (!(local[j] > 0.0)) local[j] = global[j];
  }
  return local;
}

std::vector<double> propose_step(std::span<const double> current, double step_factor,
                                 std::span<const double> sigma, Rng& rng) {
  std::uniform_real_distribution<double> r(-1.0, 1.0);
  std::vector<double> candidate(current.begin(), current.end());
  for (std::size_t j = 0; j < candidate.size(); ++j) {
    candidate[j] += step_factor * r(rng) * sigma[j];
  }
  return candidate;
}

WalkResult lawn_mower_walk(std::span<const double> start, double start_log_l, double threshold,
                           std::size_t steps, double step_factor, std::span<const double> sigma,
                           const Problem& problem, Rng& rng, std::size_t try_budget) {
  WalkResult result;
  result.point.assign(start.begin(), start.end());
  result.log_l = start_log_l;
  std::size_t accepted = 0;
  while (accepted < steps) {
    if (result.tries >= try_budget) return result;
    std::vector<double> candidate = propose_step(result.point, step_factor, sigma, rng);
    ++result.tries;
    if (!problem.space.contains(candidate)) {
      result.last_failed = std::move(candidate);
      continue;
    }
    const double log_l = problem.log_l(candidate);
    if (log_l > threshold) {
      result.point = std::move(candidate);
      result.log_l = log_l;
      ++accepted;
    } else {
      result.last_failed = std::move(candidate);
    }
  }
  result.accepted = true;
  return result;
}

std::vector<double> recenter_at(std::span<const double> failed, std::span<const double> barycenter,
                                double u) {
  std::vector<double> out(barycenter.begin(), barycenter.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += u * (failed[j] - barycenter[j]);
  return out;
}

std::vector<double> strategy_recenter(std::span<const double> failed,
                                      std::span<const double> barycenter, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return recenter_at(failed, barycenter, unit(rng));
}

std::vector<double> strategy_synthesize(const LivePointSet& live, Rng& rng) {
  if (live.size() == 0) throw std::invalid_argument("strategy_synthesize: empty live set");
  std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
  std::vector<double> out(live.dim());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = live.point(pick(rng))[j];
  return out;
}

WalkOutcome find_new_point(LivePointSet& live, double threshold, const WalkParams& params,
                           const Problem& problem, const ClusterHook& cluster, Rng& rng) {
  if (live.size() == 0) throw std::invalid_argument("find_new_point: empty live set");
  std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
  std::bernoulli_distribution coin(0.5);

  WalkOutcome outcome;
  std::vector<double> start;
  double start_log_l = kNegInf;
  std::vector<double> sigma;
  int label = -1;

  auto restart_from_live = [&] {
    const std::size_t i = pick(rng);
    const auto p = live.point(i);
    start.assign(p.begin(), p.end());
    start_log_l = live.log_l(i);
    sigma = live.walk_sigma(i);
    label = live.label(i);
  };

  restart_from_live();
  std::size_t cycles = 0;
  for (;;) {
    WalkResult walk = lawn_mower_walk(start, start_log_l, threshold, params.steps, params.step_factor,
                                      sigma, problem, rng, params.tries_per_cycle);
    outcome.tries += walk.tries;
    if (walk.accepted) {
      outcome.point = std::move(walk.point);
      outcome.log_l = walk.log_l;
      outcome.label = label;
      return outcome;
    }
    if (outcome.tries >= params.try_budget) {
      throw ReplacementFailure("no live point above threshold after " +
                                   std::to_string(outcome.tries) + " tries",
                               outcome.tries, outcome.events);
    }
    ++cycles;
    if (params.clustering && cluster && cycles % params.cycles_per_cluster == 0) {
      live.set_labels(cluster(live.points()));
      ++outcome.events.cluster;
      restart_from_live();
      continue;
    }

    std::vector<double> candidate;
    if (coin(rng)) {
      const std::vector<double>& failed = walk.last_failed.empty() ? walk.point : walk.last_failed;
      candidate = strategy_recenter(failed, live.barycenter(), rng);
      ++outcome.events.recenter;
    } else {
      candidate = strategy_synthesize(live, rng);
      ++outcome.events.synthesize;
    }
    ++outcome.rescue_evaluations;
    const double log_l = problem.space.contains(candidate) ? problem.log_l(candidate) : kNegInf;
    if (log_l > threshold) {
      start = std::move(candidate);
      start_log_l = log_l;
    } else {
      restart_from_live();
    }
  }
}

}  // namespace msnest

#include "msnest/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <numeric>
#include <sstream>
#include <thread>

namespace msnest {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

void SamplerConfig::validate(std::size_t dim) const {
  if (live_points < 2) throw std::invalid_argument("K (live points) must be >= 2");
  if (walk_steps < 1) throw std::invalid_argument("N (walk steps) must be >= 1");
  if (!(step_factor > 0.0) || !std::isfinite(step_factor)) {
    throw std::invalid_argument("f (step factor) must be > 0");
  }
  if (tries_per_cycle < 1) throw std::invalid_argument("N_t must be >= 1");
  if (cycles_per_cluster < 1) throw std::invalid_argument("NN_t must be >= 1");
  if (!(term_eps > 0.0)) throw std::invalid_argument("term_eps must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (clustering) clustering->validate(dim);
}

std::vector<std::string> SamplerConfig::warnings() const {
  std::vector<std::string> out;
  const double reach = step_factor * static_cast<double>(walk_steps);
  if (reach < 1.0) {
    std::ostringstream msg;
    msg << "f*N < 1 (f*N = " << reach << "): walks cover less than one standard deviation";
    out.push_back(msg.str());
  }
  if (tries_per_cycle < walk_steps) {
    out.push_back("N_t < N: a walk needs at least N tries, so every walk exhausts and only rescue "
                  "strategies can succeed");
  }
  return out;
}

WalkParams SamplerConfig::walk_params() const {
  WalkParams p;
  p.steps = walk_steps;
  p.step_factor = step_factor;
  p.tries_per_cycle = tries_per_cycle;
  p.cycles_per_cluster = cycles_per_cluster;
  p.try_budget = try_budget > 0 ? try_budget : 100 * tries_per_cycle * cycles_per_cluster;
  p.clustering = clustering.has_value();
  return p;
}

double shrinkage_log_volume(std::size_t m, std::size_t live_points) {
  return -static_cast<double>(m) / static_cast<double>(live_points);
}

EvidenceSum accumulate_evidence(std::span<const ChainPoint> chain, Quadrature rule,
                                const LiveRemainder& remainder) {
  const std::size_t n = chain.size();
  double prev = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (!(chain[m].log_x < prev)) {
      throw std::invalid_argument("accumulate_evidence: log X must be strictly decreasing below 0");
    }
    prev = chain[m].log_x;
  }

  EvidenceSum out;
  out.log_dx.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double before = m == 0 ? 0.0 : chain[m - 1].log_x;
    if (rule == Quadrature::Rectangle) {
      out.log_dx[m] = log_diff_exp(before, chain[m].log_x);
      continue;
    }
    const double after = m + 1 < n ? chain[m + 1].log_x : chain[m].log_x;
    double log_dx = log_diff_exp(before, after) - kLn2;
    if (m == 0) log_dx = log_add_exp(log_dx, log_diff_exp(0.0, chain[0].log_x) - kLn2);
    out.log_dx[m] = log_dx;
  }

  std::vector<double> terms(n + 1);
  for (std::size_t m = 0; m < n; ++m) terms[m] = chain[m].log_l + out.log_dx[m];
  out.log_remainder = remainder.log_x + remainder.log_mean_l;
  if (std::isnan(out.log_remainder)) out.log_remainder = kNegInf;
  terms[n] = out.log_remainder;
  out.log_evidence = log_sum_exp(terms);
  return out;
}

double information_gain(std::span<const double> log_l, std::span<const double> log_weight,
                        double log_evidence) {
  double h = 0.0;
  for (std::size_t m = 0; m < log_l.size(); ++m) {
    if (log_weight[m] == kNegInf) continue;
    const double p = std::exp(log_weight[m] - log_evidence);
    h += p * (log_l[m] - log_evidence);
  }
  if (h < 0.0 && h > -1e-9) h = 0.0;
  return h;
}

double bayesian_complexity(std::span<const double> log_l, std::span<const double> log_weight,
                           double log_evidence, double log_l_max) {
  double mean = 0.0;
  for (std::size_t m = 0; m < log_l.size(); ++m) {
    if (log_weight[m] == kNegInf) continue;
    mean += std::exp(log_weight[m] - log_evidence) * log_l[m];
  }
  return -2.0 * (mean - log_l_max);
}

NestedRun run_nested(const Problem& problem, const SamplerConfig& config, std::uint64_t seed) {
  const std::size_t dim = problem.space.dim();
  config.validate(dim);
  const double cpu_start = thread_cpu_seconds();
  const std::size_t k = config.live_points;
  const WalkParams walk = config.walk_params();
  const double log_term_eps = std::log(config.term_eps);

  NestedRun run;
  run.seed = seed;
  Rng rng(seed);

  LivePointSet live(dim);
  std::size_t attempts = 0;
  while (live.size() < k && attempts < 100 * k) {
    ++attempts;
    std::vector<double> p = sample_prior(problem.space, rng);
    const double log_l = problem.log_l(p);
    if (std::isfinite(log_l)) live.add(p, log_l);
  }
  if (live.size() < k) {
    run.status = RunStatus::Aborted;
    run.diagnostic = "could not draw " + std::to_string(k) + " prior points with finite likelihood";
    run.cpu_seconds = thread_cpu_seconds() - cpu_start;
    return run;
  }

  ClusterHook hook;
  if (config.clustering) {
    hook = [cfg = *config.clustering](const PointMatrix& points) {
      return cluster_points(points, cfg).labels;
    };
  }

  std::vector<ChainPoint> chain;
  double running_log_e = kNegInf;
  double log_x = 0.0;
  std::size_t m = 0;
  for (;;) {
    const std::size_t worst = live.worst_index();
    const double threshold = live.log_l(worst);
    const double max_log_l = live.max_log_l();
    if (max_log_l == threshold) break;  // plateau: the remainder term is exact
    if (m > 0 && max_log_l + log_x - running_log_e < log_term_eps) break;
    if (m == config.max_iter) {
      run.status = RunStatus::MaxIterations;
      break;
    }

    ++m;
    const double next_log_x = shrinkage_log_volume(m, k);
    running_log_e = log_add_exp(running_log_e, threshold + log_diff_exp(log_x, next_log_x));
    log_x = next_log_x;
    chain.push_back({threshold, log_x});
    DiscardedSample sample;
    const auto p = live.point(worst);
    sample.params.assign(p.begin(), p.end());
    sample.log_l = threshold;
    sample.log_x = log_x;
    run.samples.push_back(std::move(sample));
    live.remove(worst);

    try {
      WalkOutcome found = find_new_point(live, threshold, walk, problem, hook, rng);
      if (!(found.log_l > threshold)) ++run.constraint_violations;
      if (!problem.space.contains(found.point)) ++run.out_of_bounds;
      run.total_tries += found.tries;
      run.rescue_evaluations += found.rescue_evaluations;
      run.recenter_events += found.events.recenter;
      run.synthesize_events += found.events.synthesize;
      run.cluster_invocations += found.events.cluster;
      live.add(found.point, found.log_l, live.has_labels() ? found.label : -1);
    } catch (const ReplacementFailure& failure) {
      run.total_tries += failure.tries();
      run.recenter_events += failure.events().recenter;
      run.synthesize_events += failure.events().synthesize;
      run.cluster_invocations += failure.events().cluster;
      run.status = RunStatus::Aborted;
      run.diagnostic = "iteration " + std::to_string(m) + ": " + failure.what();
      break;
    }
  }
  run.iterations = m;

  // final live points, ordered by likelihood, stand in for the remaining volume
  std::vector<std::size_t> order(live.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return live.log_l(a) < live.log_l(b); });
  const double log_n_live = std::log(static_cast<double>(live.size()));
  LiveRemainder rest{log_x, log_sum_exp(live.log_ls()) - log_n_live};

  const EvidenceSum sum = accumulate_evidence(chain, config.quadrature, rest);
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    run.samples[i].log_dx = sum.log_dx[i];
    run.samples[i].log_weight = run.samples[i].log_l + sum.log_dx[i];
  }
  for (std::size_t i : order) {
    DiscardedSample s;
    const auto p = live.point(i);
    s.params.assign(p.begin(), p.end());
    s.log_l = live.log_l(i);
    s.log_x = log_x;
    s.log_dx = log_x - log_n_live;
    s.log_weight = s.log_l + s.log_dx;
    run.remainder.push_back(std::move(s));
  }
  run.log_evidence = sum.log_evidence;
  run.log_evidence_terms = run.samples.size() + run.remainder.size();

  std::vector<double> all_log_l;
  std::vector<double> all_log_w;
  all_log_l.reserve(run.log_evidence_terms);
  all_log_w.reserve(run.log_evidence_terms);
  for (const auto* group : {&run.samples, &run.remainder}) {
    for (const auto& s : *group) {
      all_log_l.push_back(s.log_l);
      all_log_w.push_back(s.log_weight);
    }
  }
  const double log_l_max = *std::max_element(all_log_l.begin(), all_log_l.end());
  run.information = information_gain(all_log_l, all_log_w, run.log_evidence);
  run.complexity = bayesian_complexity(all_log_l, all_log_w, run.log_evidence, log_l_max);
  run.cpu_seconds = thread_cpu_seconds() - cpu_start;
  return run;
}

std::vector<NestedRun> run_many(const Problem& problem, const SamplerConfig& config,
                                std::size_t threads) {
  config.validate(problem.space.dim());
  std::vector<NestedRun> runs(config.n_runs);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.n_runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        runs[i] = run_nested(problem, config, config.seed + i);
      } catch (const std::exception& e) {
        runs[i] = NestedRun{};
        runs[i].seed = config.seed + i;
        runs[i].status = RunStatus::Aborted;
        runs[i].diagnostic = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
    return runs;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return runs;
}

CombinedEvidence combine_runs(std::span<const NestedRun> runs) {
  CombinedEvidence out;
  for (const auto& r : runs) {
    if (r.status != RunStatus::Aborted) out.per_run.push_back(r.log_evidence);
  }
  out.usable_runs = out.per_run.size();
  if (out.per_run.empty()) return out;
  const double n = static_cast<double>(out.per_run.size());
  out.mean_log_evidence = std::accumulate(out.per_run.begin(), out.per_run.end(), 0.0) / n;
  if (out.per_run.size() >= 2) {
    double ss = 0.0;
    for (double v : out.per_run) ss += (v - out.mean_log_evidence) * (v - out.mean_log_evidence);
    out.delta_log_evidence = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

}  // namespace msnest

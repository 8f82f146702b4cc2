#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "msnest/engine.hpp"
#include "oracles.hpp"

using namespace msnest;
using doctest::Approx;

namespace {

Problem gaussian_1d(double sigma = 1.0) {
  return {ParameterSpace({"a"}, {-10.0 * sigma}, {10.0 * sigma}), gaussian_target({0.0}, {sigma})};
}

SamplerConfig small_config(std::size_t k) {
  SamplerConfig c;
  c.live_points = k;
  c.n_runs = 8;
  c.clustering.reset();
  return c;
}

}  // namespace

TEST_CASE("shrinkage_log_volume") {
  CHECK(shrinkage_log_volume(0, 17) == 0.0);
  CHECK(shrinkage_log_volume(50, 50) == -1.0);
  CHECK(std::exp(shrinkage_log_volume(50, 50)) == Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("shrinkage matches the largest of K uniforms") {
  // E[ln max(U_1..U_K)] = -1/K, checked by direct sampling
  const std::size_t k = 100;
  const std::size_t draws = 1'000'000;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    double mx = 0.0;
    for (std::size_t i = 0; i < k; ++i) mx = std::max(mx, u(rng));
    const double l = std::log(mx);
    sum += l;
    sum2 += l * l;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - shrinkage_log_volume(1, k)) < 3.0 * se);
}

TEST_CASE("accumulate_evidence: constant integrand telescopes to 1") {
  const double log_c = std::log(3.7);
  const std::size_t k = 10;
  std::vector<ChainPoint> chain;
  for (std::size_t m = 1; m <= 40; ++m) chain.push_back({log_c, shrinkage_log_volume(m, k)});
  const LiveRemainder rem{chain.back().log_x, log_c};
  for (Quadrature q : {Quadrature::Rectangle, Quadrature::Trapezoid}) {
    const EvidenceSum s = accumulate_evidence(chain, q, rem);
    CHECK(s.log_evidence == Approx(log_c).epsilon(1e-13));
    std::vector<double> all = s.log_dx;
    all.push_back(rem.log_x);
    CHECK(log_sum_exp(all) == Approx(0.0).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("accumulate_evidence: single rectangle step") {
  const double l1 = -0.7;
  const LiveRemainder rem{-1.0, 0.4};
  const EvidenceSum s = accumulate_evidence(std::vector<ChainPoint>{{l1, -1.0}}, Quadrature::Rectangle, rem);
  const double expect = log_add_exp(l1 + std::log(1.0 - std::exp(-1.0)), -1.0 + 0.4);
  CHECK(s.log_evidence == Approx(expect).epsilon(1e-14));
  CHECK(s.log_dx[0] == Approx(std::log(1.0 - std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("accumulate_evidence: trapezoid weights") {
  const std::vector<ChainPoint> chain{{0.0, std::log(0.5)}, {0.0, std::log(0.25)}, {0.0, std::log(0.125)}};
  const EvidenceSum s = accumulate_evidence(chain, Quadrature::Trapezoid, {std::log(0.125), kNegInf});
  // first sample covers [X_1, X_0] plus half of [X_2, X_1]
  CHECK(std::exp(s.log_dx[0]) == Approx(0.5 + 0.125));
  CHECK(std::exp(s.log_dx[1]) == Approx((0.5 - 0.125) / 2));
  CHECK(std::exp(s.log_dx[2]) == Approx((0.25 - 0.125) / 2));
}

TEST_CASE("accumulate_evidence rejects a non-decreasing volume") {
  const std::vector<ChainPoint> bad{{0.0, -0.1}, {0.0, -0.1}};
  CHECK_THROWS_AS(accumulate_evidence(bad, Quadrature::Rectangle, {-0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("information and complexity on a two-sample chain") {
  // prior masses 0.8 / 0.2 with L = 1 / 4 give equal posterior weights
  const std::vector<double> log_l{0.0, std::log(4.0)};
  const std::vector<double> log_w{std::log(0.8), std::log(4.0) + std::log(0.2)};
  const double log_e = log_sum_exp(log_w);
  CHECK(log_e == Approx(std::log(1.6)));
  const double h_oracle = 0.5 * (0.0 - log_e) + 0.5 * (std::log(4.0) - log_e);
  CHECK(information_gain(log_l, log_w, log_e) == Approx(h_oracle).epsilon(1e-14));
  CHECK(information_gain(log_l, log_w, log_e) == Approx(0.223144).epsilon(1e-6));
  CHECK(bayesian_complexity(log_l, log_w, log_e, std::log(4.0)) == Approx(1.386294).epsilon(1e-6));
}

TEST_CASE("information and complexity vanish for a constant likelihood") {
  const std::vector<double> log_l(5, 2.0);
  std::vector<double> log_w;
  for (int i = 0; i < 5; ++i) log_w.push_back(2.0 + std::log(0.2));
  CHECK(information_gain(log_l, log_w, 2.0) == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(bayesian_complexity(log_l, log_w, 2.0, 2.0) == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("complexity is non-negative on random chains") {
  Rng rng(5);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> log_l(20), log_w(20);
    for (std::size_t i = 0; i < 20; ++i) {
      log_l[i] = n(rng);
      log_w[i] = log_l[i] + n(rng);
    }
    const double log_e = log_sum_exp(log_w);
    CHECK(bayesian_complexity(log_l, log_w, log_e, *std::max_element(log_l.begin(), log_l.end())) >= 0.0);
  }
}

TEST_CASE("run_nested: constant likelihood") {
  const double log_c = std::log(0.3);
  const Problem p{ParameterSpace({"a", "b"}, {0, 0}, {1, 2}), constant_target(log_c)};
  SamplerConfig c = small_config(50);
  c.quadrature = Quadrature::Rectangle;
  const NestedRun run = run_nested(p, c, 9);
  CHECK(run.status == RunStatus::Converged);
  CHECK(run.log_evidence == Approx(log_c).epsilon(1e-12));
  CHECK(std::abs(run.information) < 1e-9);
  CHECK(run.iterations < 5);
}

TEST_CASE("run_nested: 1D Gaussian against quadrature") {
  const Problem p = gaussian_1d(1.0);
  const double oracle = oracle::log_evidence_box(
      [](const oracle::Vec& x) { return std::exp(-0.5 * x[0] * x[0]) / std::sqrt(2.0 * M_PI); }, {-10.0},
      {10.0});
  SamplerConfig c = small_config(200);
  const auto runs = run_many(p, c, 1);
  const CombinedEvidence ce = combine_runs(runs);
  REQUIRE(ce.delta_log_evidence);
  CHECK(std::abs(ce.mean_log_evidence - oracle) <= 3.0 * *ce.delta_log_evidence);
  for (const auto& r : runs) {
    CHECK(r.constraint_violations == 0);
    CHECK(r.out_of_bounds == 0);
    CHECK(r.information > 1.0);
  }
}

TEST_CASE("run_nested: symmetric bimodal target") {
  // two equal unit Gaussians at -4 and 4 in [-10, 10]
  const auto lik = [](std::span<const double> x) {
    const double a = -0.5 * (x[0] - 4.0) * (x[0] - 4.0);
    const double b = -0.5 * (x[0] + 4.0) * (x[0] + 4.0);
    return log_add_exp(a, b) - std::log(2.0 * std::sqrt(2.0 * M_PI));
  };
  const Problem p{ParameterSpace({"a"}, {-10.0}, {10.0}), lik};
  const double oracle = oracle::log_evidence_box(
      [&](const oracle::Vec& x) { return std::exp(lik(x)); }, {-10.0}, {10.0});
  SamplerConfig c = small_config(200);
  c.clustering = ClusterConfig{};
  const auto runs = run_many(p, c, 1);
  const CombinedEvidence ce = combine_runs(runs);
  REQUIRE(ce.delta_log_evidence);
  CHECK(std::abs(ce.mean_log_evidence - oracle) <= 3.0 * *ce.delta_log_evidence);
  for (const auto& r : runs) {
    std::size_t left = 0, right = 0;
    for (const auto& s : r.samples) {
      if (s.log_l > lik(std::vector<double>{4.0}) - 2.0) (s.params[0] < 0 ? left : right)++;
    }
    CHECK(left > 0);
    CHECK(right > 0);
  }
}

TEST_CASE("run_nested is deterministic for a seed") {
  const Problem p = gaussian_1d();
  const SamplerConfig c = small_config(40);
  const NestedRun a = run_nested(p, c, 77);
  const NestedRun b = run_nested(p, c, 77);
  CHECK(a.log_evidence == b.log_evidence);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].params == b.samples[i].params);
  const NestedRun other = run_nested(p, c, 78);
  CHECK(other.log_evidence != a.log_evidence);
}

TEST_CASE("run_many seeds run i with seed + i and keeps order") {
  const Problem p = gaussian_1d();
  SamplerConfig c = small_config(30);
  c.n_runs = 4;
  c.seed = 100;
  const auto threaded = run_many(p, c, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(threaded[i].seed == 100 + i);
    CHECK(threaded[i].log_evidence == run_nested(p, c, 100 + i).log_evidence);
  }
}

TEST_CASE("combine_runs") {
  std::vector<NestedRun> runs(2);
  runs[0].log_evidence = -1.0;
  runs[1].log_evidence = -3.0;
  CombinedEvidence ce = combine_runs(runs);
  CHECK(ce.mean_log_evidence == -2.0);
  CHECK(*ce.delta_log_evidence == Approx(std::sqrt(2.0)));

  runs[1].log_evidence = -1.0;
  CHECK(*combine_runs(runs).delta_log_evidence == 0.0);

  runs.emplace_back().status = RunStatus::Aborted;
  ce = combine_runs(runs);
  CHECK(ce.usable_runs == 2);
  CHECK_FALSE(combine_runs(std::span(runs).first(1)).delta_log_evidence.has_value());
}

TEST_CASE("an unreachable constraint aborts the run with a diagnostic") {
  // the initial K draws get distinct likelihoods, every later evaluation falls below them
  auto calls = std::make_shared<int>(0);
  const Problem p{ParameterSpace({"a"}, {0.0}, {1.0}), [calls](std::span<const double>) {
                    return ++*calls <= 8 ? static_cast<double>(*calls) : -1.0;
                  }};
  SamplerConfig c = small_config(8);
  c.tries_per_cycle = 20;
  c.cycles_per_cluster = 2;
  c.try_budget = 400;
  const NestedRun run = run_nested(p, c, 3);
  CHECK(run.status == RunStatus::Aborted);
  CHECK_FALSE(run.diagnostic.empty());
  CHECK(run.constraint_violations == 0);
  CHECK(run.out_of_bounds == 0);
  CHECK(combine_runs(std::vector<NestedRun>{run}).usable_runs == 0);
}

TEST_CASE("SamplerConfig validation") {
  SamplerConfig c;
  CHECK_NOTHROW(c.validate(3));
  c.step_factor = -0.1;
  CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
  c = SamplerConfig{};
  c.live_points = 0;
  CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
  c = SamplerConfig{};
  c.walk_steps = 10;
  c.step_factor = 0.05;
  CHECK_NOTHROW(c.validate(3));
  REQUIRE(c.warnings().size() == 1);
  CHECK(c.warnings()[0].find("f*N < 1") != std::string::npos);
  c.try_budget = 0;
  CHECK(c.walk_params().try_budget == 100 * c.tries_per_cycle * c.cycles_per_cluster);
}

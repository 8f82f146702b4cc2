#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "msnest/mean_shift.hpp"
#include "msnest/walker.hpp"

using namespace msnest;
using doctest::Approx;

namespace {

Problem unit_gaussian_1d() {
  return {ParameterSpace({"a"}, {-10.0}, {10.0}), gaussian_target({0.0}, {1.0})};
}

LivePointSet filled(const Problem& p, std::size_t k, Rng& rng) {
  LivePointSet live(p.space.dim());
  for (std::size_t i = 0; i < k; ++i) {
    const auto x = sample_prior(p.space, rng);
    live.add(x, p.log_l(x));
  }
  return live;
}

}  // namespace

TEST_CASE("propose_step degenerate cases") {
  Rng rng(1);
  const std::vector<double> x{1.0, -2.0};
  CHECK(propose_step(x, 0.0, std::vector<double>{1.0, 1.0}, rng) == x);
  CHECK(propose_step(x, 0.3, std::vector<double>{0.0, 0.0}, rng) == x);
}

TEST_CASE("propose_step displacement law") {
  Rng rng(2);
  const std::vector<double> x{0.0, 0.0};
  const std::vector<double> sigma{1.0, 4.0};
  const double f = 0.2;
  const int n = 100000;
  double sum[2] = {0, 0};
  double max_abs[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    const auto c = propose_step(x, f, sigma, rng);
    for (int j = 0; j < 2; ++j) {
      sum[j] += c[j];
      max_abs[j] = std::max(max_abs[j], std::abs(c[j]));
    }
  }
  for (int j = 0; j < 2; ++j) {
    // uniform on [-f s, f s]: standard error of the mean is f s / sqrt(3 n)
    const double se = f * sigma[j] / std::sqrt(3.0 * n);
    CHECK(std::abs(sum[j] / n) < 4.0 * se);
    CHECK(max_abs[j] <= f * sigma[j]);
    CHECK(max_abs[j] > 0.99 * f * sigma[j]);
  }
}

TEST_CASE("lawn_mower_walk without a constraint") {
  const Problem p = unit_gaussian_1d();
  Rng rng(4);
  const std::vector<double> start{0.0};
  const auto w = lawn_mower_walk(start, p.log_l(start), kNegInf, 20, 0.2, std::vector<double>{1.0}, p, rng,
                                 1000);
  CHECK(w.accepted);
  CHECK(w.tries >= 20);
  CHECK(p.space.contains(w.point));
}

TEST_CASE("lawn_mower_walk with an impossible constraint exhausts the budget") {
  const Problem p = unit_gaussian_1d();
  Rng rng(4);
  const std::vector<double> start{0.0};
  const auto w =
      lawn_mower_walk(start, p.log_l(start), 10.0, 20, 0.2, std::vector<double>{1.0}, p, rng, 137);
  CHECK_FALSE(w.accepted);
  CHECK(w.tries == 137);
  CHECK_FALSE(w.last_failed.empty());
}

TEST_CASE("lawn_mower_walk at the one-sigma contour covers both sides") {
  const Problem p = unit_gaussian_1d();
  const double threshold = p.log_l(std::vector<double>{1.0});
  Rng rng(8);
  int left = 0, right = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> start{0.0};
    const auto w =
        lawn_mower_walk(start, p.log_l(start), threshold, 20, 0.2, std::vector<double>{0.6}, p, rng, 2000);
    REQUIRE(w.accepted);
    CHECK(w.log_l > threshold);
    (w.point[0] < 0 ? left : right)++;
  }
  CHECK(left > 300);
  CHECK(right > 300);
}

TEST_CASE("recentering") {
  const std::vector<double> bary{1.0, 2.0, 3.0};
  const std::vector<double> failed{4.0, -1.0, 0.5};
  CHECK(recenter_at(bary, bary, 0.37) == bary);
  CHECK(recenter_at(failed, bary, 0.0) == bary);
  CHECK(recenter_at(failed, bary, 1.0) == failed);

  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto c = strategy_recenter(failed, bary, rng);
    // c - bary must be a non-negative multiple (<= 1) of failed - bary
    const double u = (c[0] - bary[0]) / (failed[0] - bary[0]);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(bary[j] + u * (failed[j] - bary[j]) - c[j]) < 1e-12);
  }
}

TEST_CASE("synthesize draws coordinates from live points") {
  Rng rng(7);
  LivePointSet one(2);
  one.add(std::vector<double>{0.25, 0.75}, 0.0);
  CHECK(strategy_synthesize(one, rng) == std::vector<double>{0.25, 0.75});

  LivePointSet live(3);
  live.add(std::vector<double>{1, 2, 3}, 0.0);
  live.add(std::vector<double>{4, 5, 6}, 0.0);
  live.add(std::vector<double>{7, 8, 9}, 0.0);
  for (int i = 0; i < 200; ++i) {
    const auto c = strategy_synthesize(live, rng);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK((c[j] == live.point(0)[j] || c[j] == live.point(1)[j] || c[j] == live.point(2)[j]));
    }
  }
}

TEST_CASE("synthesize combinations are uniform") {
  Rng rng(9);
  LivePointSet live(2);
  live.add(std::vector<double>{0.0, 0.0}, 0.0);
  live.add(std::vector<double>{1.0, 1.0}, 0.0);
  const int n = 10000;
  std::map<std::pair<double, double>, int> counts;
  for (int i = 0; i < n; ++i) {
    const auto c = strategy_synthesize(live, rng);
    ++counts[{c[0], c[1]}];
  }
  REQUIRE(counts.size() == 4);
  const double expect = n / 4.0;
  const double sd = std::sqrt(n * 0.25 * 0.75);
  for (const auto& [combo, count] : counts) CHECK(std::abs(count - expect) < 3.0 * sd);
}

TEST_CASE("LivePointSet statistics") {
  LivePointSet live(2);
  live.add(std::vector<double>{0.0, 0.0}, -3.0);
  live.add(std::vector<double>{2.0, 0.0}, -1.0);
  live.add(std::vector<double>{10.0, 4.0}, -2.0);
  live.add(std::vector<double>{12.0, 4.0}, -5.0);
  CHECK(live.worst_index() == 3);
  CHECK(live.max_log_l() == -1.0);
  CHECK(live.barycenter() == std::vector<double>{6.0, 2.0});
  const auto global = live.sigma();
  CHECK(global[0] == Approx(std::sqrt((36 + 16 + 16 + 36) / 4.0)));

  live.set_labels({0, 0, 1, 1});
  const auto c0 = live.cluster_sigma(0);
  CHECK(c0[0] == Approx(1.0));
  CHECK(c0[1] == 0.0);
  CHECK(c0[0] < global[0]);
  // a zero cluster component falls back to the global one
  const auto ws = live.walk_sigma(0);
  CHECK(ws[0] == Approx(1.0));
  CHECK(ws[1] == Approx(global[1]));

  live.set_labels({0, 0, 0, 0});
  CHECK(live.cluster_sigma(0) == live.sigma());

  live.remove(0);
  CHECK(live.size() == 3);
  CHECK(live.point(0)[0] == 12.0);
  CHECK(live.label(0) == 0);
  CHECK_THROWS(live.add(std::vector<double>{1.0, 1.0}, 0.0));
}

TEST_CASE("find_new_point: unconstrained threshold needs one walk") {
  const Problem p = unit_gaussian_1d();
  Rng rng(10);
  LivePointSet live = filled(p, 20, rng);
  WalkParams params;
  const WalkOutcome out = find_new_point(live, kNegInf, params, p, nullptr, rng);
  CHECK(out.events.recenter + out.events.synthesize + out.events.cluster == 0);
  CHECK(out.tries >= params.steps);
  CHECK(out.tries < params.tries_per_cycle);
}

TEST_CASE("find_new_point: cluster hook fires after exactly N_t * NN_t tries") {
  const Problem p = unit_gaussian_1d();
  Rng rng(12);
  LivePointSet live = filled(p, 20, rng);
  WalkParams params;
  params.tries_per_cycle = 50;
  params.cycles_per_cluster = 3;
  params.clustering = true;
  int hook_calls = 0;
  const ClusterHook hook = [&](const PointMatrix& pts) {
    ++hook_calls;
    return std::vector<int>(pts.rows(), 0);
  };

  // budget reached one cycle before the hook would fire
  params.try_budget = params.tries_per_cycle * params.cycles_per_cluster;
  try {
    find_new_point(live, 100.0, params, p, hook, rng);
    FAIL("expected a failure");
  } catch (const ReplacementFailure& e) {
    CHECK(e.tries() == params.try_budget);
    CHECK(e.events().cluster == 0);
    CHECK(e.events().recenter + e.events().synthesize == params.cycles_per_cluster - 1);
  }
  CHECK(hook_calls == 0);

  params.try_budget = params.tries_per_cycle * (params.cycles_per_cluster + 1);
  try {
    find_new_point(live, 100.0, params, p, hook, rng);
    FAIL("expected a failure");
  } catch (const ReplacementFailure& e) {
    CHECK(e.events().cluster == 1);
  }
  CHECK(hook_calls == 1);
  CHECK(live.has_labels());
}

TEST_CASE("find_new_point keeps every replacement above threshold and in the box") {
  const Problem p{ParameterSpace({"a", "b"}, {-3.0, -3.0}, {3.0, 3.0}), gaussian_target({2.5, -2.5}, {0.3, 0.3})};
  Rng rng(13);
  LivePointSet live = filled(p, 30, rng);
  WalkParams params;
  for (int i = 0; i < 300; ++i) {
    const std::size_t w = live.worst_index();
    const double threshold = live.log_l(w);
    live.remove(w);
    const WalkOutcome out = find_new_point(live, threshold, params, p, nullptr, rng);
    CHECK(out.log_l > threshold);
    CHECK(p.space.contains(out.point));
    live.add(out.point, out.log_l);
  }
}

TEST_CASE("clustering lets replacements populate both basins") {
  // two narrow, well separated modes in 2D
  const auto lik = [](std::span<const double> x) {
    const auto g = [&](double cx, double cy) {
      return -((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)) / (2 * 0.05 * 0.05);
    };
    return log_add_exp(g(0.25, 0.25), g(0.75, 0.75));
  };
  const Problem p{ParameterSpace({"a", "b"}, {0.0, 0.0}, {1.0, 1.0}), lik};
  Rng rng(14);
  LivePointSet live = filled(p, 100, rng);
  WalkParams params;
  params.clustering = true;
  ClusterConfig cc;
  const ClusterHook hook = [&](const PointMatrix& pts) { return cluster_points(pts, cc).labels; };
  std::size_t basin[2] = {0, 0};
  for (int i = 0; i < 1500; ++i) {
    const std::size_t w = live.worst_index();
    const double threshold = live.log_l(w);
    live.remove(w);
    const WalkOutcome out = find_new_point(live, threshold, params, p, hook, rng);
    REQUIRE(out.log_l > threshold);
    live.add(out.point, out.log_l, live.has_labels() ? std::max(out.label, 0) : -1);
    if (i >= 1000) ++basin[out.point[0] < 0.5 ? 0 : 1];
  }
  CHECK(basin[0] > 0);
  CHECK(basin[1] > 0);
}

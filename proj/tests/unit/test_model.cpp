#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "msnest/data_io.hpp"
#include "msnest/model.hpp"
#include "msnest/numeric.hpp"

using namespace msnest;
using doctest::Approx;

TEST_CASE("log-space helpers") {
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(log_add_exp(kNegInf, 1.5) == 1.5);
  CHECK(log_add_exp(kNegInf, kNegInf) == kNegInf);
  CHECK(log_add_exp(1000.0, 1000.0) == Approx(1000.0 + std::log(2.0)));

  const std::vector<double> v{std::log(1.0), std::log(2.0), std::log(7.0)};
  CHECK(log_sum_exp(v) == Approx(std::log(10.0)).epsilon(1e-14));
  CHECK(log_sum_exp(std::vector<double>{}) == kNegInf);

  CHECK(log_diff_exp(std::log(5.0), std::log(3.0)) == Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(log_diff_exp(2.0, 2.0) == kNegInf);
  CHECK(log_diff_exp(0.0, kNegInf) == 0.0);
  CHECK_THROWS(log_diff_exp(1.0, 2.0));
}

TEST_CASE("log_gamma agrees with std::lgamma") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 7.5, 21.0, 150.0, 1e4}) {
    CHECK(log_gamma(x) == Approx(std::lgamma(x)).epsilon(1e-12));
  }
  CHECK(log_gamma(1.0) == Approx(0.0).scale(1.0).epsilon(1e-13));
  CHECK(log_gamma(3.0) == Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("PointMatrix rows") {
  PointMatrix m(0, 2);
  m.append_row(std::vector<double>{1, 2});
  m.append_row(std::vector<double>{3, 4});
  m.append_row(std::vector<double>{5, 6});
  CHECK(m.rows() == 3);
  m.swap_remove_row(0);
  CHECK(m.rows() == 2);
  CHECK(m(0, 0) == 5);
  CHECK(m(1, 1) == 4);
  m.set_row(1, std::vector<double>{7, 8});
  CHECK(m.row(1)[0] == 7);
  CHECK_THROWS(m.append_row(std::vector<double>{1}));
}

TEST_CASE("ParameterSpace validation and prior draws") {
  CHECK_THROWS_AS(ParameterSpace({"a"}, {1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ParameterSpace({"a"}, {1.0 + 1e-12}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ParameterSpace({}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ParameterSpace({"a"}, {0.0}, {INFINITY}), std::invalid_argument);

  const ParameterSpace unit({"a"}, {0.0}, {1.0});
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_prior(unit, rng);
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 1.0);
  }

  const ParameterSpace box({"a", "b"}, {-2.0, 10.0}, {3.0, 11.0});
  Rng r1(42), r2(42);
  CHECK(sample_prior(box, r1) == sample_prior(box, r2));
  CHECK(box.contains(std::vector<double>{3.0, 10.0}));
  CHECK_FALSE(box.contains(std::vector<double>{3.0 + 1e-9, 10.5}));
}

TEST_CASE("model_eval") {
  const auto one = ModelSpec::gauss_peaks(1);
  CHECK(one.param_count() == 4);
  // [bg, width, pos, amp]
  CHECK(model_eval(one, std::vector<double>{0, 1, 5, 2}, std::vector<double>{5})[0] == Approx(2.0));

  const auto three = ModelSpec::gauss_peaks(3);
  const std::vector<double> flat{3, 1.5, 10, 20, 30, 0, 0, 0};
  for (double v : model_eval(three, flat, std::vector<double>{-4, 0, 17.3, 100})) CHECK(v == 3.0);

  const auto decay = ModelSpec::modulated_decay();
  CHECK(model_eval(decay, std::vector<double>{1, 2, 0, 5, 0.3}, std::vector<double>{2})[0] ==
        Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(model_eval(decay, std::vector<double>{2, 1, 0.5, 0, 0}, std::vector<double>{0})[0] == Approx(3.0));

  CHECK_THROWS_AS(model_eval(one, std::vector<double>{0, 1, 5}, std::vector<double>{5}), LayoutError);
  CHECK(three.default_names() ==
        std::vector<std::string>{"bg", "width", "pos1", "pos2", "pos3", "amp1", "amp2", "amp3"});
}

TEST_CASE("Poisson and Gaussian log-likelihood") {
  const auto one = ModelSpec::gauss_peaks(1);
  // a single channel with lambda equal to the background
  auto counts = [](double y) { return Dataset::counts({0.0}, {y}); };
  const std::vector<double> lam1{1, 1, 50, 0};
  const std::vector<double> lam2{2, 1, 50, 0};
  CHECK(log_likelihood(one, lam1, counts(0)) == Approx(-1.0));

  // oracle: ln(e^-l l^y / y!) evaluated directly
  const double oracle = std::log(std::exp(-2.0) * 4.0 / 2.0);
  CHECK(log_likelihood(one, lam2, counts(2)) == Approx(oracle).epsilon(1e-13));
  CHECK(oracle == Approx(-1.306853).epsilon(1e-6));

  const std::vector<double> zero{0, 1, 50, 0};
  CHECK(log_likelihood(one, zero, counts(0)) == 0.0);
  CHECK(log_likelihood(one, zero, counts(3)) == kNegInf);

  const auto g = Dataset::gaussian({0.0}, {4.0}, {1.0});
  const std::vector<double> mu4{4, 1, 50, 0};
  CHECK(log_likelihood(one, mu4, g) == Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(log_likelihood(one, mu4, g) == Approx(-0.918939).epsilon(1e-6));
  const std::vector<double> mu2{2, 1, 50, 0};
  CHECK(log_likelihood(one, mu2, Dataset::gaussian({0.0}, {4.0}, {2.0})) ==
        Approx(-0.5 - std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi)));

  const std::vector<double> bad{NAN, 1, 50, 0};
  CHECK_THROWS_AS(log_likelihood(one, bad, counts(1)), InputError);
  CHECK_THROWS_AS(log_likelihood(one, std::vector<double>{1, 1}, counts(1)), LayoutError);
}

TEST_CASE("Dataset validation") {
  CHECK_THROWS(Dataset::counts({0, 1}, {1}));
  CHECK_THROWS(Dataset::counts({0}, {-1}));
  CHECK_THROWS(Dataset::counts({0}, {1.5}));
  CHECK_THROWS(Dataset::gaussian({0}, {1}, {0}));
  CHECK(Dataset::counts({0, 1}, {0, 3}).log_normalization() == Approx(-std::log(6.0)));
}

TEST_CASE("analytic targets") {
  const auto g = gaussian_target({1.0, -2.0}, {0.5, 2.0});
  const double expect = -std::log(0.5) - std::log(2.0) - std::log(2.0 * std::numbers::pi);
  CHECK(g(std::vector<double>{1.0, -2.0}) == Approx(expect).epsilon(1e-14));
  CHECK(g(std::vector<double>{1.5, -2.0}) == Approx(expect - 0.5).epsilon(1e-14));
  CHECK(constant_target(-3.25)(std::vector<double>{0.1, 7}) == -3.25);

  const auto bound = make_log_likelihood(ModelSpec::gauss_peaks(1), Dataset::counts({0.0}, {2.0}));
  CHECK(bound(std::vector<double>{2, 1, 50, 0}) == Approx(-1.306853).epsilon(1e-6));
}

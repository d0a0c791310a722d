#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ctrace/attack.hpp"
#include "ctrace/credalnet.hpp"
#include "support.hpp"

using namespace ctrace;
using test::make_bn;
using test::make_dag;
using test::make_population;

namespace {

struct Fixture {
  Dag g;
  BayesNet truth;
  Population t;
  Population r;
};

Fixture fixture(std::uint64_t seed, int nodes = 8, std::size_t t_size = 200,
                std::size_t r_size = 1000) {
  Rng rng(Seed{seed});
  Dag g = test::random_small_dag(rng, nodes, 2, 0.5);
  BayesNet truth = random_parameters(g, Seed{rng.next()});
  Population t = forward_sample(truth, t_size, Seed{rng.next()});
  Population r = forward_sample(truth, r_size, Seed{rng.next()});
  return {std::move(g), std::move(truth), std::move(t), std::move(r)};
}

}  // namespace

TEST_SUITE("attack") {

TEST_CASE("llr examples") {
  const Dag one = make_dag(1, {});
  const auto model = make_attack_model(ModelKind::bn, make_bn(one, {{{0.2, 0.8}}}),
                                       make_bn(one, {{{0.5, 0.5}}}));
  CHECK(llr(model, std::vector<int>{1}) == doctest::Approx(std::log(1.6)).epsilon(1e-14));
  CHECK(llr(model, std::vector<int>{0}) == doctest::Approx(std::log(0.4)).epsilon(1e-14));

  const auto f = fixture(1);
  const BayesNet theta = mle(f.g, f.r);
  const auto same = make_attack_model(ModelKind::bn, theta, theta);
  for (std::size_t i = 0; i < f.t.size(); ++i) CHECK(llr(same, f.t.row(i)) == 0.0);

  CHECK_THROWS_AS(llr(model, std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(make_attack_model(ModelKind::bn, theta, make_bn(one, {{{0.5, 0.5}}})),
                  std::invalid_argument);
}

TEST_CASE("vacuous CN gives a constant zero statistic") {
  const auto f = fixture(2);
  std::vector<IntervalCpt> icpts;
  for (const auto& v : f.g.variables()) {
    icpts.push_back({v.id, v.cardinality,
                     std::vector<Interval>(f.g.num_parent_configurations(v.id) * v.cardinality,
                                           Interval{0.0, 1.0})});
  }
  const CredalNet vacuous(f.g, std::move(icpts));
  const auto model = make_attack_model(ModelKind::cn, constrained_mle(vacuous, f.r, 100, Seed{1}),
                                       mle(f.g, f.r));
  for (double l : llr_all(model, f.r)) CHECK(l == 0.0);
  for (double l : llr_all(model, f.t)) CHECK(l == 0.0);
  for (double alpha : {1e-4, 0.05, 0.5, 0.99}) {
    const auto test = calibrate(model, f.r, alpha);
    CHECK(test.tau == 0.0);
    for (std::size_t i = 0; i < f.t.size(); ++i) CHECK(decide(test, f.t.row(i)) == Decision::non_member);
  }
}

TEST_CASE("calibrate examples") {
  const auto f = fixture(3);
  const auto model = make_attack_model(ModelKind::bn, mle(f.g, f.t), mle(f.g, f.r));
  const auto l = llr_all(model, f.r);
  const double n = static_cast<double>(f.r.size());
  const auto low = calibrate(model, f.r, 1.0 - 1.0 / n);
  CHECK(low.tau == *std::min_element(l.begin(), l.end()));
  const auto high = calibrate(model, f.r, 1e-9);
  CHECK(high.tau == *std::max_element(l.begin(), l.end()));

  const BayesNet theta = mle(f.g, f.r);
  const auto same = make_attack_model(ModelKind::bn, theta, theta);
  for (double alpha : {0.01, 0.3, 0.9}) CHECK(calibrate(same, f.r, alpha).tau == 0.0);

  CHECK_THROWS_AS(calibrate(model, Population(f.g.size(), {}), 0.05), std::invalid_argument);
  CHECK_THROWS_AS(calibrate(model, f.r, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate(model, f.r, 1.0), std::invalid_argument);
}

TEST_CASE("threshold on 100 evenly spaced values follows the higher rule") {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i / 100.0);
  const EmpiricalDistribution d(v);
  // F_n(0.94) = 0.95: the smallest value reaching the 0.95 level.
  CHECK(threshold(d, 0.05) == 0.94);
  // Exactly 5 of the 100 values lie strictly above it.
  CHECK(std::count_if(v.begin(), v.end(), [](double x) { return x > 0.94; }) == 5);
}

TEST_CASE("decide uses a strict inequality") {
  const Dag one = make_dag(1, {});
  const auto model = make_attack_model(ModelKind::bn, make_bn(one, {{{0.2, 0.8}}}),
                                       make_bn(one, {{{0.5, 0.5}}}));
  const double l = llr(model, std::vector<int>{1});
  CalibratedTest test{model, 0.05, l};
  CHECK(decide(test, std::vector<int>{1}) == Decision::non_member);
  test.tau = std::nextafter(l, -1.0);
  CHECK(decide(test, std::vector<int>{1}) == Decision::member);
  CHECK(std::isfinite(calibrate(model, make_population({{0}, {1}}), 0.5).tau));
}

TEST_CASE("evaluate with identical target and reference has zero power") {
  const auto f = fixture(4);
  const BayesNet theta = mle(f.g, f.r);
  const auto alphas = log_spaced_alphas(1e-3, 0.9, 10);
  const auto curve = evaluate(make_attack_model(ModelKind::bn, theta, theta), f.t, f.r, alphas);
  REQUIRE(curve.points.size() == alphas.size());
  for (const auto& p : curve.points) CHECK(p.beta == 0.0);
}

TEST_CASE("power is non-decreasing in alpha") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto f = fixture(seed);
    const auto model = make_attack_model(ModelKind::bn, mle(f.g, f.t), mle(f.g, f.r));
    const auto curve = evaluate(model, f.t, f.r, log_spaced_alphas(1e-4, 0.631, 20));
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
      CHECK(curve.points[k].beta >= curve.points[k - 1].beta);
      CHECK(curve.points[k].alpha > curve.points[k - 1].alpha);
    }
    for (const auto& p : curve.points) {
      CHECK(p.beta >= 0.0);
      CHECK(p.beta <= 1.0);
    }
  }
}

TEST_CASE("realised type I error on the null sample is at most alpha + 1/|R|") {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const auto f = fixture(seed);
    const auto model = make_attack_model(ModelKind::bn, mle(f.g, f.t), mle(f.g, f.r));
    const auto curve = evaluate(model, f.r, f.r, log_spaced_alphas(1e-3, 0.631, 15));
    for (const auto& p : curve.points) {
      CHECK(p.beta <= p.alpha + 1.0 / static_cast<double>(f.r.size()) + 1e-12);
    }
  }
}

TEST_CASE("theoretical_power examples") {
  for (double c : {1.0, 30.0, 500.0}) {
    CHECK(theoretical_power(c, 500, 0.5) ==
          doctest::Approx(test::normal_cdf(std::sqrt(c / 500.0))).epsilon(1e-12));
  }
  CHECK(theoretical_power(500, 500, 0.5) == doctest::Approx(0.841344746).epsilon(1e-9));
  for (double alpha : {1e-4, 0.01, 0.3}) {
    CHECK(theoretical_power(1.0, 100000000, alpha) == doctest::Approx(alpha).epsilon(1e-3));
  }
  CHECK_THROWS_AS(theoretical_power(10, 500, 0.0), std::domain_error);
  CHECK_THROWS_AS(theoretical_power(10, 500, 1.0), std::domain_error);
  CHECK_THROWS_AS(theoretical_power(0.5, 500, 0.1), std::domain_error);
  CHECK_THROWS_AS(theoretical_power(10, 0, 0.1), std::domain_error);
}

TEST_CASE("theoretical_power monotonicity on a grid") {
  const auto alphas = log_spaced_alphas(1e-4, 0.631, 20);
  for (double c : {1.0, 10.0, 100.0, 1000.0}) {
    for (std::size_t t : {50u, 500u, 5000u}) {
      for (std::size_t k = 1; k < alphas.size(); ++k) {
        CHECK(theoretical_power(c, t, alphas[k]) > theoretical_power(c, t, alphas[k - 1]));
      }
      CHECK(theoretical_power(c * 2, t, 0.01) > theoretical_power(c, t, 0.01));
      CHECK(theoretical_power(c, t * 2, 0.01) < theoretical_power(c, t, 0.01));
    }
  }
}

TEST_CASE("alpha grids") {
  const auto grid = log_spaced_alphas(1e-4, 0.631, 20);
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == doctest::Approx(1e-4).epsilon(1e-14));
  CHECK(grid.back() == doctest::Approx(0.631).epsilon(1e-14));
  for (std::size_t k = 2; k < grid.size(); ++k) {
    CHECK(grid[k] / grid[k - 1] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-12));
  }
  CHECK_NOTHROW(check_alpha_grid(grid));
  CHECK_THROWS_AS(check_alpha_grid(std::vector<double>{0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(check_alpha_grid(std::vector<double>{0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(check_alpha_grid(std::vector<double>{0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(check_alpha_grid(std::vector<double>{0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("curve kind names") {
  for (auto k : {CurveKind::bn_empirical, CurveKind::cn_empirical, CurveKind::theoretical}) {
    CHECK(curve_kind_from_string(to_string(k)) == k);
  }
  CHECK(to_string(CurveKind::bn_empirical) == "BN");
  CHECK(to_string(CurveKind::cn_empirical) == "CN");
  CHECK(to_string(CurveKind::theoretical) == "theoretical");
  CHECK_THROWS(curve_kind_from_string("bn"));
}

TEST_CASE("power_points agrees with calibrate and decide") {
  const auto f = fixture(50);
  const auto model = make_attack_model(ModelKind::bn, mle(f.g, f.t), mle(f.g, f.r));
  const auto alphas = log_spaced_alphas(1e-3, 0.5, 8);
  const auto curve = evaluate(model, f.t, f.r, alphas);
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const auto test = calibrate(model, f.r, alphas[k]);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < f.t.size(); ++i) flagged += decide(test, f.t.row(i)) == Decision::member;
    CHECK(curve.points[k].beta == static_cast<double>(flagged) / static_cast<double>(f.t.size()));
  }
}

}  // TEST_SUITE

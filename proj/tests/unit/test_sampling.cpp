#include <cmath>
#include <numbers>

#include <doctest.h>

#include "btit/errors.hpp"
#include "btit/sampling.hpp"

using namespace btit;
using namespace btit::sampling;

namespace {

Scenario plane(double size, std::vector<geometry::Box> boxes = {})
{
  Scenario s;
  s.name = "plane";
  s.system = "si2d";
  s.workspace.lower = Vector::Zero(2);
  s.workspace.upper = Vector::Constant(2, size);
  s.workspace.position_dims = {0, 1};
  s.obstacles.boxes = std::move(boxes);
  s.start = (Vector(2) << 0.2 * size, 0.5 * size).finished();
  s.goal = (Vector(2) << 0.8 * size, 0.5 * size).finished();
  return s;
}

// Obstacle-free steering costs from the start and to the goal.
CostEstimator steering_estimator(const Scenario& scn)
{
  auto steerer = std::make_shared<dynamics::Steerer>(scn.make_system());
  return [&scn, steerer](const Vector& x) {
    return CostEstimate{steerer->steer(scn.start, x).cost, steerer->steer(x, scn.goal).cost};
  };
}

}  // namespace

TEST_SUITE("sampling")
{
  TEST_CASE("uniform samples cover the box")
  {
    const auto scn = plane(1.0);
    auto rng = batch_stream(3, 0);
    Vector sum = Vector::Zero(2);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Vector x = sample_uniform(scn, rng);
      CHECK_MESSAGE(((x.array() >= 0.0).all() && (x.array() <= 1.0).all()), "sample out of bounds");
      sum += x;
    }
    sum /= n;
    CHECK(std::abs(sum[0] - 0.5) <= 0.01);
    CHECK(std::abs(sum[1] - 0.5) <= 0.01);
  }

  TEST_CASE("uniform sampling avoids obstacles and reports infeasible spaces")
  {
    const auto scn = plane(10.0, {{(Vector(2) << 2, 2).finished(), (Vector(2) << 8, 8).finished()}});
    auto rng = batch_stream(4, 0);
    for (int i = 0; i < 2000; ++i)
      CHECK(geometry::state_valid(scn, sample_uniform(scn, rng)));

    const auto full = plane(10.0, {{(Vector(2) << -1, -1).finished(), (Vector(2) << 11, 11).finished()}});
    CHECK_THROWS_AS(sample_uniform(full, rng), InfeasibleSpaceError);
  }

  TEST_CASE("batches are reproducible and independent")
  {
    const auto scn = plane(14.0);
    auto a = batch_stream(42, 0);
    auto b = batch_stream(42, 0);
    const auto ba = informed_sample(scn, 50, INFINITY, a, {});
    const auto bb = informed_sample(scn, 50, INFINITY, b, {});
    REQUIRE(ba.states.size() == 50);
    for (std::size_t i = 0; i < 50; ++i)
      CHECK(ba.states[i] == bb.states[i]);

    auto c = batch_stream(42, 1);
    auto d = batch_stream(43, 0);
    CHECK(informed_sample(scn, 1, INFINITY, c, {}).states[0] != ba.states[0]);
    CHECK(informed_sample(scn, 1, INFINITY, d, {}).states[0] != ba.states[0]);
  }

  TEST_CASE("an infinite incumbent accepts every valid draw")
  {
    const auto scn = plane(10.0);
    auto rng = batch_stream(5, 0);
    const auto batch = informed_sample(scn, 500, INFINITY, rng, steering_estimator(scn));
    CHECK(batch.states.size() == 500);
    CHECK(batch.draws == 500);
    CHECK_FALSE(batch.truncated);
    CHECK_THROWS_AS(informed_sample(scn, 0, INFINITY, rng, {}), PreconditionError);
    CHECK_THROWS_AS(informed_sample(scn, 5, 10.0, rng, {}), PreconditionError);
  }

  TEST_CASE("informed samples lie in the informed set")
  {
    const auto scn = plane(10.0, {{(Vector(2) << 4, 3).finished(), (Vector(2) << 5, 7).finished()}});
    const auto estimate = steering_estimator(scn);
    auto rng = batch_stream(6, 2);
    const double c_best = 14.0;
    const auto batch = informed_sample(scn, 2000, c_best, rng, estimate, 2);
    CHECK(batch.batch_index == 2);
    REQUIRE(batch.states.size() == 2000);
    for (std::size_t i = 0; i < batch.states.size(); ++i) {
      CHECK(geometry::state_valid(scn, batch.states[i]));
      CHECK(estimate(batch.states[i]).total() < c_best);
      CHECK(batch.estimates[i].total() == estimate(batch.states[i]).total());
    }
  }

  TEST_CASE("informed acceptance rate matches the ellipse area")
  {
    // Single integrator: the optimal steer takes |d| seconds and costs 2|d|,
    // so the informed set for C is the ellipse with foci at start and goal and
    // major axis C / 2.
    const auto scn = plane(10.0);
    auto rng = batch_stream(7, 0);
    const double c_best = 16.0;
    const auto batch = informed_sample(scn, 33000, c_best, rng, steering_estimator(scn));
    const double a = c_best / 4.0;
    const double c = 0.5 * (scn.goal - scn.start).norm();
    const double area = std::numbers::pi * a * std::sqrt(a * a - c * c);
    const double expected = area / 100.0;
    const double observed = static_cast<double>(batch.states.size()) / static_cast<double>(batch.draws);
    CHECK(batch.draws >= 90000);
    CHECK(std::abs(observed - expected) <= 0.05 * expected);
  }

  TEST_CASE("a tighter incumbent accepts a subset")
  {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (int i = 0; i < 10000; ++i) {
      const CostEstimate e{u(rng), u(rng)};
      const double c1 = u(rng), c2 = c1 + u(rng);
      if (in_informed_set(e, c1))
        CHECK(in_informed_set(e, c2));
    }
    CHECK_FALSE(in_informed_set({3.0, 2.0}, 5.0));
  }

  TEST_CASE("direct ellipsoid sampling is uniform over the ellipse")
  {
    const auto scn = plane(10.0);
    auto rng = batch_stream(9, 0);
    const double c_best = 8.0;
    const auto batch = informed_sample_phs(scn, 20000, c_best, rng);
    REQUIRE(batch.states.size() == 20000);
    const double c = 0.5 * (scn.goal - scn.start).norm();
    // Share inside the confocal ellipse with major axis 7.
    const double a_outer = c_best / 2.0, a_inner = 3.5;
    const double ratio = (a_inner * std::sqrt(a_inner * a_inner - c * c)) / (a_outer * std::sqrt(a_outer * a_outer - c * c));
    int inner = 0;
    for (const auto& x : batch.states) {
      const double sum = (x - scn.start).norm() + (x - scn.goal).norm();
      CHECK(sum <= c_best + 1e-9);
      inner += sum <= 2.0 * a_inner;
    }
    CHECK(std::abs(inner / 20000.0 - ratio) <= 0.02);
  }
}

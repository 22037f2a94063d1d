#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "ampc/model.hpp"

using namespace ampc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK_THAT(wrap_angle(pi), WithinAbs(pi, 1e-15));
  CHECK_THAT(wrap_angle(-pi), WithinAbs(pi, 1e-15));          // boundary goes up
  CHECK_THAT(wrap_angle(3.0 * pi / 2.0), WithinAbs(-pi / 2.0, 1e-12));
  CHECK_THAT(wrap_angle(-3.0 * pi / 2.0), WithinAbs(pi / 2.0, 1e-12));
  CHECK_THAT(wrap_angle(7.0 * pi + 0.1), WithinAbs(-pi + 0.1, 1e-12));
  for (double a = -50.0; a <= 50.0; a += 0.7) {
    const double w = wrap_angle(a);
    CHECK(w > -pi - 1e-15);
    CHECK(w <= pi + 1e-15);
    CHECK_THAT(std::sin(w), WithinAbs(std::sin(a), 1e-9));
    CHECK_THAT(std::cos(w), WithinAbs(std::cos(a), 1e-9));
  }
}

TEST_CASE("proxy parameters for the benchmark robot") {
  const ProxyParams th = to_proxy({5.0, 0.1, 0.2, 0.1}, 0.1);
  CHECK_THAT(th.alpha_v, WithinAbs(0.998, 1e-15));
  CHECK_THAT(th.beta_v, WithinAbs(0.02, 1e-15));
  CHECK_THAT(th.alpha_w, WithinAbs(0.95, 1e-15));
  CHECK_THAT(th.beta_w, WithinAbs(0.5, 1e-15));
}

TEST_CASE("proxy transform round-trips physical parameters") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mass(0.2, 50.0);
  std::uniform_real_distribution<double> drag(0.0, 5.0);
  std::uniform_real_distribution<double> step(0.01, 0.5);
  for (int i = 0; i < 200; ++i) {
    const PhysicalParams p{mass(rng), drag(rng), mass(rng), drag(rng)};
    const double dt = step(rng);
    const PhysicalParams q = from_proxy(to_proxy(p, dt), dt);
    CHECK_THAT(q.mass, WithinRel(p.mass, 1e-12));
    CHECK_THAT(q.inertia, WithinRel(p.inertia, 1e-12));
    CHECK_THAT(q.linear_drag, WithinAbs(p.linear_drag, 1e-12 * p.mass / dt));
    CHECK_THAT(q.angular_drag,
               WithinAbs(p.angular_drag, 1e-12 * p.inertia / dt));
  }
}

TEST_CASE("from_proxy requires positive input gains") {
  CHECK_THROWS_AS(from_proxy({1.0, 0.0, 1.0, 0.1}, 0.1), DomainError);
  CHECK_THROWS_AS(from_proxy({1.0, 0.1, 1.0, -0.2}, 0.1), DomainError);
  CHECK_THROWS_AS(from_proxy({1.0, 0.1, 1.0, 0.1}, 0.0), DomainError);
}

TEST_CASE("physical parameter validation") {
  CHECK_NOTHROW(validate(PhysicalParams{}));
  CHECK_NOTHROW(validate(PhysicalParams{1.0, 0.0, 1.0, 0.0}));  // zero drag ok
  CHECK_THROWS_AS(validate(PhysicalParams{0.0, 0.1, 0.2, 0.1}), DomainError);
  CHECK_THROWS_AS(validate(PhysicalParams{5.0, -0.1, 0.2, 0.1}), DomainError);
  CHECK_THROWS_AS(validate(PhysicalParams{5.0, 0.1, -0.2, 0.1}), DomainError);
  CHECK_THROWS_AS(
      validate(PhysicalParams{std::nan(""), 0.1, 0.2, 0.1}), DomainError);
}

TEST_CASE("one discrete step of a coasting robot") {
  const ProxyParams th{0.998, 0.02, 0.95, 0.5};
  const State s1 = step_discrete({0, 0, 0, 1, 0}, {0, 0}, th, 0.1);
  CHECK_THAT(s1.x, WithinAbs(0.1, 1e-15));
  CHECK(s1.y == 0.0);
  CHECK(s1.psi == 0.0);
  CHECK_THAT(s1.v, WithinAbs(0.998, 1e-15));
  CHECK(s1.omega == 0.0);
}

TEST_CASE("rest is a fixed point") {
  const ProxyParams th = to_proxy(PhysicalParams{}, 0.1);
  const State rest{2.0, -3.0, 0.7, 0.0, 0.0};
  const State next = step_discrete(rest, {0, 0}, th, 0.1);
  CHECK(next.x == rest.x);
  CHECK(next.y == rest.y);
  CHECK(next.psi == rest.psi);
  CHECK(next.v == 0.0);
  CHECK(next.omega == 0.0);
}

TEST_CASE("heading straight up drifts only negligibly in x") {
  // cos(pi/2) is ~6e-17 rather than 0, so x moves at rounding level only.
  const ProxyParams th = to_proxy(PhysicalParams{}, 0.1);
  const State s = step_discrete({0, 0, std::numbers::pi / 2, 1, 0}, {0, 0},
                                th, 0.1);
  CHECK_THAT(s.x, WithinAbs(0.0, 1e-16));
  CHECK_THAT(s.y, WithinAbs(0.1, 1e-15));
}

TEST_CASE("discrete step equals explicit Euler of the continuous dynamics") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const PhysicalParams p{5.0, 0.1, 0.2, 0.1};
  const double dt = 0.1;
  const ProxyParams th = to_proxy(p, dt);
  for (int i = 0; i < 200; ++i) {
    const State s{U(rng), U(rng), U(rng), U(rng), U(rng)};
    const Input u{3.0 * U(rng), 3.0 * U(rng)};
    const StateDerivative d = continuous_derivative(s, u, p);
    const State n = step_discrete(s, u, th, dt);
    CHECK_THAT(n.x, WithinAbs(s.x + dt * d.x, 1e-12));
    CHECK_THAT(n.y, WithinAbs(s.y + dt * d.y, 1e-12));
    CHECK_THAT(n.psi, WithinAbs(s.psi + dt * d.psi, 1e-12));
    CHECK_THAT(n.v, WithinAbs(s.v + dt * d.v, 1e-12));
    CHECK_THAT(n.omega, WithinAbs(s.omega + dt * d.omega, 1e-12));
  }
}

TEST_CASE("rolling constraint holds for every reachable state") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const ProxyParams th = to_proxy(PhysicalParams{}, 0.1);
  State s{1, 1, 0, 0, 0};
  for (int i = 0; i < 500; ++i) {
    CHECK(std::abs(constraint_residual(s)) <= 1e-12);
    s = step_discrete(s, {3.0 * U(rng), 3.0 * U(rng)}, th, 0.1);
  }
}

TEST_CASE("zero-input speed decays geometrically") {
  const ProxyParams th = to_proxy({5.0, 0.1, 0.2, 0.1}, 0.1);
  State s{0, 0, 0, 2.0, 1.0};
  double v = 2.0, w = 1.0;
  for (int k = 0; k < 100; ++k) {
    s = step_discrete(s, {0, 0}, th, 0.1);
    v *= th.alpha_v;
    w *= th.alpha_w;
    CHECK_THAT(s.v, WithinRel(v, 1e-14));
    CHECK_THAT(s.omega, WithinRel(w, 1e-14));
  }
  CHECK(std::abs(s.v) < 2.0);
  CHECK(std::abs(s.omega) < 1e-2);
}

TEST_CASE("step_discrete rejects junk") {
  const ProxyParams th = to_proxy(PhysicalParams{}, 0.1);
  CHECK_THROWS_AS(
      step_discrete({std::nan(""), 0, 0, 0, 0}, {0, 0}, th, 0.1), DomainError);
  CHECK_THROWS_AS(
      step_discrete({0, 0, 0, 0, 0}, {HUGE_VAL, 0}, th, 0.1), DomainError);
  CHECK_THROWS_AS(step_discrete({}, {}, th, 0.0), DomainError);
  CHECK_THROWS_AS(step_discrete({}, {}, th, -0.1), DomainError);
  CHECK_THROWS_AS(
      step_discrete({}, {}, ProxyParams{std::nan(""), 0.1, 1, 0.1}, 0.1),
      DomainError);
}

TEST_CASE("lateral force is the centripetal reaction") {
  const PhysicalParams p{5.0, 0.1, 0.2, 0.1};
  CHECK(lateral_force({0, 0, 0, 2.0, 0.5}, p) == 5.0);
  CHECK(lateral_force({0, 0, 1.0, 0.0, 0.5}, p) == 0.0);
  CHECK(lateral_force({0, 0, 0, -2.0, 0.5}, p) == -5.0);
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ampc/controller.hpp"

using namespace ampc;
using Catch::Matchers::WithinAbs;

namespace {

SimConfig small_config(int steps, int horizon) {
  SimConfig cfg;
  cfg.total_steps = steps;
  cfg.horizon = horizon;
  return cfg;
}

}  // namespace

TEST_CASE("starting at the goal, the loop does exactly nothing") {
  SimConfig cfg = small_config(20, 5);
  cfg.x_init = State{};  // the goal
  const TrajectoryLog log = run_closed_loop(cfg);
  REQUIRE(log.states.size() == 21);
  REQUIRE(log.inputs.size() == 20);
  REQUIRE(log.theta.size() == 21);
  REQUIRE(log.eps_v.size() == 20);
  REQUIRE(log.cost.size() == 20);
  for (const Input& u : log.inputs) {
    CHECK(u.thrust == 0.0);
    CHECK(u.moment == 0.0);
  }
  for (const State& s : log.states) {
    CHECK(s.x == 0.0);
    CHECK(s.y == 0.0);
    CHECK(s.v == 0.0);
  }
  for (double c : log.cost) CHECK(c == 0.0);
  for (double e : log.eps_v) CHECK(e == 0.0);
  // zero regressors never move the estimate
  for (const ProxyParams& th : log.theta) {
    CHECK(th.alpha_v == 1.0);
    CHECK(th.beta_v == 0.1);
  }
}

TEST_CASE("control_step at the goal returns the zero input") {
  const SimConfig cfg = small_config(1, 10);
  const auto [u, sol] = control_step(State{}, ProxyParams{0.998, 0.02, 0.95, 0.5},
                                     cfg);
  CHECK(u.thrust == 0.0);
  CHECK(u.moment == 0.0);
  CHECK(sol.converged);
  CHECK(sol.iterations == 0);
}

TEST_CASE("one-step closed loop brakes at the analytic stationary point") {
  SimConfig cfg = small_config(1, 1);
  cfg.x_init = {0, 0, 0, 1, 0};
  cfg.adaptive = false;  // control with the true parameters
  const TrajectoryLog log = run_closed_loop(cfg);
  REQUIRE(log.inputs.size() == 1);
  CHECK_THAT(log.inputs[0].thrust, WithinAbs(-0.03992 / 1.0008, 1e-5));
  CHECK_THAT(log.inputs[0].thrust, WithinAbs(-0.03985, 1e-4));
  CHECK(log.inputs[0].moment == 0.0);
  CHECK(log.eps_v[0] == 0.0);  // predicted with the true parameters
}

TEST_CASE("learn_step ignores a resting transition") {
  const EstimatorState est{make_channel_estimate({1.0, 0.1}, 100.0),
                           make_channel_estimate({1.0, 0.1}, 100.0)};
  const EstimatorState next = learn_step(est, State{}, Input{}, State{});
  CHECK(next.v_channel.theta_hat == est.v_channel.theta_hat);
  CHECK(next.v_channel.gain == est.v_channel.gain);
  CHECK(next.w_channel.theta_hat == est.w_channel.theta_hat);
}

TEST_CASE("learn_step keeps a perfect estimate fixed") {
  const ProxyParams truth{0.998, 0.02, 0.95, 0.5};
  EstimatorState est{make_channel_estimate({truth.alpha_v, truth.beta_v}, 50.0),
                     make_channel_estimate({truth.alpha_w, truth.beta_w}, 50.0)};
  State x{0, 0, 0, 0.7, -0.3};
  for (int t = 0; t < 10; ++t) {
    const Input u{2.0 - 0.3 * t, -1.0 + 0.2 * t};
    const State x_next = step_discrete(x, u, truth, 0.1);
    est = learn_step(est, x, u, x_next);
    x = x_next;
  }
  const ProxyParams th = current_proxy(est);
  CHECK_THAT(th.alpha_v, WithinAbs(truth.alpha_v, 1e-13));
  CHECK_THAT(th.beta_v, WithinAbs(truth.beta_v, 1e-13));
  CHECK_THAT(th.alpha_w, WithinAbs(truth.alpha_w, 1e-13));
  CHECK_THAT(th.beta_w, WithinAbs(truth.beta_w, 1e-13));
}

TEST_CASE("learn_step, worked by hand") {
  // v channel with theta = (1, 0), F = I, transition v: 1 -> 0.998 under
  // zero input: phi = (1, 0), eps0 = -0.002, F+ = diag(0.5, 1),
  // theta+ = (1 - 0.5 * 0.002, 0) = (0.999, 0).
  const EstimatorState est{make_channel_estimate({1.0, 0.0}, 1.0),
                           make_channel_estimate({1.0, 0.0}, 1.0)};
  const State x{0, 0, 0, 1, 0};
  const State x_next{0.1, 0, 0, 0.998, 0};
  const EstimatorState next = learn_step(est, x, Input{}, x_next);
  CHECK_THAT(next.v_channel.theta_hat[0], WithinAbs(0.999, 1e-15));
  CHECK(next.v_channel.theta_hat[1] == 0.0);
  CHECK_THAT(next.v_channel.gain(0, 0), WithinAbs(0.5, 1e-15));
  CHECK(next.v_channel.gain(0, 1) == 0.0);
  // the yaw channel saw a zero regressor
  CHECK(next.w_channel.theta_hat == est.w_channel.theta_hat);
}

TEST_CASE("closed loop is bit-for-bit deterministic") {
  const SimConfig cfg = small_config(150, 8);
  const TrajectoryLog a = run_closed_loop(cfg);
  const TrajectoryLog b = run_closed_loop(cfg);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t t = 0; t < a.states.size(); ++t) {
    CHECK(a.states[t].x == b.states[t].x);
    CHECK(a.states[t].y == b.states[t].y);
    CHECK(a.states[t].psi == b.states[t].psi);
    CHECK(a.states[t].v == b.states[t].v);
    CHECK(a.states[t].omega == b.states[t].omega);
  }
  for (std::size_t t = 0; t < a.inputs.size(); ++t) {
    CHECK(a.inputs[t].thrust == b.inputs[t].thrust);
    CHECK(a.inputs[t].moment == b.inputs[t].moment);
    CHECK(a.theta[t].alpha_v == b.theta[t].alpha_v);
    CHECK(a.theta[t].beta_w == b.theta[t].beta_w);
  }
}

TEST_CASE("logged states are exactly the truth plant's chain") {
  const SimConfig cfg = small_config(150, 8);
  const ProxyParams truth = to_proxy(cfg.true_params, cfg.dt);
  const TrajectoryLog log = run_closed_loop(cfg);
  for (std::size_t t = 0; t < log.inputs.size(); ++t) {
    const State n = step_discrete(log.states[t], log.inputs[t], truth, cfg.dt);
    CHECK(log.states[t + 1].x == n.x);
    CHECK(log.states[t + 1].y == n.y);
    CHECK(log.states[t + 1].psi == n.psi);
    CHECK(log.states[t + 1].v == n.v);
    CHECK(log.states[t + 1].omega == n.omega);
  }
  for (const State& s : log.states)
    CHECK(std::abs(constraint_residual(s)) <= 1e-12);
}

TEST_CASE("an estimator seeded with the truth matches full knowledge") {
  SimConfig adaptive = small_config(200, 8);
  const ProxyParams truth = to_proxy(adaptive.true_params, adaptive.dt);
  adaptive.estimator.theta0_v = {truth.alpha_v, truth.beta_v};
  adaptive.estimator.theta0_w = {truth.alpha_w, truth.beta_w};
  SimConfig oracle = adaptive;
  oracle.adaptive = false;

  const TrajectoryLog la = run_closed_loop(adaptive);
  const TrajectoryLog lo = run_closed_loop(oracle);
  REQUIRE(la.inputs.size() == lo.inputs.size());
  double worst_u = 0.0, worst_x = 0.0, worst_eps = 0.0;
  for (std::size_t t = 0; t < la.inputs.size(); ++t) {
    worst_u = std::max(worst_u,
                       std::abs(la.inputs[t].thrust - lo.inputs[t].thrust));
    worst_u = std::max(worst_u,
                       std::abs(la.inputs[t].moment - lo.inputs[t].moment));
    worst_eps = std::max({worst_eps, std::abs(la.eps_v[t]),
                          std::abs(la.eps_w[t])});
  }
  for (std::size_t t = 0; t < la.states.size(); ++t) {
    worst_x = std::max(worst_x, std::hypot(la.states[t].x - lo.states[t].x,
                                           la.states[t].y - lo.states[t].y));
  }
  CHECK(worst_u <= 1e-9);
  CHECK(worst_x <= 1e-9);
  CHECK(worst_eps <= 1e-12);
}

TEST_CASE("a wildly wrong initial estimate aborts with the partial log") {
  SimConfig cfg = small_config(5, 200);
  cfg.x_init = {0, 0, 0, 1, 0};
  cfg.estimator.theta0_v = {50.0, 0.1};  // alpha 50: rollout overflows
  try {
    run_closed_loop(cfg);
    FAIL("expected ClosedLoopError");
  } catch (const ClosedLoopError& e) {
    CHECK(e.step == 0);
    CHECK(e.partial.states.size() == 1);
    CHECK(e.partial.theta.size() == 1);
    CHECK(e.partial.inputs.empty());
    CHECK(e.partial.theta[0].alpha_v == 50.0);
  }
}

TEST_CASE("closed-loop configuration validation") {
  SimConfig cfg = small_config(0, 5);
  CHECK_THROWS_AS(run_closed_loop(cfg), DomainError);
  cfg = small_config(5, 0);
  CHECK_THROWS_AS(run_closed_loop(cfg), DomainError);
  cfg = small_config(5, 5);
  cfg.dt = 0.0;
  CHECK_THROWS_AS(run_closed_loop(cfg), DomainError);
  cfg = small_config(5, 5);
  cfg.true_params.mass = -1.0;
  CHECK_THROWS_AS(run_closed_loop(cfg), DomainError);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ampc/cftoc.hpp"
#include "ampc/estimator.hpp"
#include "ampc/model.hpp"

namespace ampc {

/// Initial estimator state: per-channel parameter guess and the scale of
/// the initial adaptation gain F0 = initial_gain * I.
struct EstimatorInit {
  Eigen::Vector2d theta0_v{1.0, 0.1};
  Eigen::Vector2d theta0_w{1.0, 0.1};
  double initial_gain{100.0};
};

/// Full description of one closed-loop run.
struct SimConfig {
  PhysicalParams true_params{};  // hidden from the adaptive controller
  double dt{0.1};
  int total_steps{500};  // M
  int horizon{30};       // N
  State x_init{1.0, 1.0, 0.0, 0.0, 0.0};
  State x_goal{};
  Vec5 state_weights{Vec5::Ones()};
  Eigen::Vector2d input_weights{1.0, 1.0};
  Vec5 terminal_weights{Vec5::Ones()};
  InputBounds bounds{};
  SolverOptions solver{};
  EstimatorInit estimator{};
  bool adaptive{true};
};

/// Everything recorded during a closed-loop run: M+1 states, M applied
/// inputs, and per-step estimates, prediction errors, and solver stats.
/// theta[t] is the parameter set the controller used at step t; the last
/// entry is the final estimate.
struct TrajectoryLog {
  std::vector<State> states;
  std::vector<Input> inputs;
  std::vector<ProxyParams> theta;
  std::vector<double> eps_v;
  std::vector<double> eps_w;
  std::vector<double> cost;
  std::vector<int> iterations;
  std::vector<std::uint8_t> converged;
  double dt{0.1};
};

/// Solver failure partway through a run; carries what was logged up to the
/// failing step.
struct ClosedLoopError : std::runtime_error {
  std::size_t step;
  TrajectoryLog partial;

  ClosedLoopError(const std::string& what, std::size_t failing_step,
                  TrajectoryLog log)
      : std::runtime_error(what), step(failing_step), partial(std::move(log)) {}
};

inline void validate(const SimConfig& cfg) {
  validate(cfg.true_params);
  if (cfg.total_steps < 1)
    throw DomainError("SimConfig: total_steps must be >= 1");
  if (cfg.horizon < 1) throw DomainError("SimConfig: horizon must be >= 1");
  if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0))
    throw DomainError("SimConfig: dt must be finite and > 0");
  if (!is_finite(cfg.x_init)) throw DomainError("SimConfig: non-finite x_init");
  if (!is_finite(cfg.x_goal)) throw DomainError("SimConfig: non-finite x_goal");
}

inline CftocProblem make_problem(const State& x, const ProxyParams& theta,
                                 const SimConfig& cfg) {
  CftocProblem prob;
  prob.x0 = x;
  prob.x_ref = cfg.x_goal;
  prob.horizon = cfg.horizon;
  prob.state_weights = cfg.state_weights;
  prob.input_weights = cfg.input_weights;
  prob.terminal_weights = cfg.terminal_weights;
  prob.bounds = cfg.bounds;
  prob.theta = theta;
  prob.dt = cfg.dt;
  prob.options = cfg.solver;
  return prob;
}

/// One receding-horizon step: solve the CFTOC from the measured state with
/// the current parameters and return the first optimal input with the full
/// solution.
inline std::pair<Input, Solution> control_step(
    const State& x, const ProxyParams& theta, const SimConfig& cfg,
    std::span<const Input> warm_start = {}) {
  Solution sol = solve(make_problem(x, theta, cfg), warm_start);
  return {sol.u_seq.front(), std::move(sol)};
}

/// Feeds one measured transition to both channel estimators.
inline EstimatorState learn_step(const EstimatorState& est, const State& x,
                                 const Input& u, const State& x_next) {
  return {update(est.v_channel, regressor_v(x, u), x_next.v),
          update(est.w_channel, regressor_w(x, u), x_next.omega)};
}

/// Runs the closed loop for total_steps: solve, apply the first input to
/// the truth plant, update the estimate from the measured transition,
/// repeat. The truth plant uses the same Euler-discretized model with the
/// true parameters. Fully deterministic.
inline TrajectoryLog run_closed_loop(const SimConfig& cfg) {
  validate(cfg);
  const ProxyParams proxy_true = to_proxy(cfg.true_params, cfg.dt);
  EstimatorState est{
      make_channel_estimate(cfg.estimator.theta0_v, cfg.estimator.initial_gain),
      make_channel_estimate(cfg.estimator.theta0_w, cfg.estimator.initial_gain)};

  const std::size_t steps = static_cast<std::size_t>(cfg.total_steps);
  TrajectoryLog log;
  log.dt = cfg.dt;
  log.states.reserve(steps + 1);
  log.inputs.reserve(steps);
  log.theta.reserve(steps + 1);
  log.eps_v.reserve(steps);
  log.eps_w.reserve(steps);
  log.cost.reserve(steps);
  log.iterations.reserve(steps);
  log.converged.reserve(steps);

  State x = cfg.x_init;
  ProxyParams theta = cfg.adaptive ? current_proxy(est) : proxy_true;
  std::vector<Input> warm;
  log.states.push_back(x);

  for (std::size_t t = 0; t < steps; ++t) {
    Input u;
    Solution sol;
    try {
      std::tie(u, sol) = control_step(x, theta, cfg, warm);
    } catch (const SolverError& e) {
      log.theta.push_back(theta);  // keep one estimate row per logged state
      throw ClosedLoopError(std::string("closed loop aborted at step ") +
                                std::to_string(t) + ": " + e.what(),
                            t, std::move(log));
    }

    const State x_next = step_discrete(x, u, proxy_true, cfg.dt);
    const double eps_v = x_next.v - (theta.alpha_v * x.v + theta.beta_v * u.thrust);
    const double eps_w =
        x_next.omega - (theta.alpha_w * x.omega + theta.beta_w * u.moment);

    log.theta.push_back(theta);
    log.inputs.push_back(u);
    log.eps_v.push_back(eps_v);
    log.eps_w.push_back(eps_w);
    log.cost.push_back(sol.cost);
    log.iterations.push_back(sol.iterations);
    log.converged.push_back(sol.converged ? 1 : 0);
    log.states.push_back(x_next);

    if (cfg.adaptive) {
      est = learn_step(est, x, u, x_next);
      theta = current_proxy(est);
    }
    warm = shift_warm_start(sol.u_seq);
    x = x_next;
  }
  log.theta.push_back(theta);
  return log;
}

}  // namespace ampc

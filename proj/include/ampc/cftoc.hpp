#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ampc/errors.hpp"
#include "ampc/model.hpp"

namespace ampc {

using Vec5 = Eigen::Matrix<double, 5, 1>;

/// Box bounds on the input, applied per axis.
struct InputBounds {
  Input lower{-10.0, -10.0};
  Input upper{10.0, 10.0};
};

/// Projected-gradient solver knobs.
struct SolverOptions {
  double tolerance{1e-6};        // projected-gradient norm to declare convergence
  int max_iterations{500};
  double armijo_slope{1e-4};
  double backtrack_shrink{0.5};
  double initial_step{1.0};
  int max_backtracks{60};
};

/// One constrained finite-time optimal control instance: drive the state
/// toward x_ref over `horizon` steps of the discrete dynamics under a
/// diagonal quadratic cost and box input bounds.
struct CftocProblem {
  State x0;
  State x_ref;
  int horizon{1};  // N
  Vec5 state_weights{Vec5::Ones()};               // Q diagonal
  Eigen::Vector2d input_weights{1.0, 1.0};        // R diagonal
  Vec5 terminal_weights{Vec5::Ones()};            // P diagonal
  InputBounds bounds;
  ProxyParams theta;
  double dt{0.1};
  SolverOptions options;
};

/// Solver output. x_pred is the shooting rollout of u_seq from x0.
struct Solution {
  std::vector<Input> u_seq;
  std::vector<State> x_pred;
  double cost{0.0};
  int iterations{0};
  bool converged{false};
  double grad_norm{0.0};
};

namespace detail {

// Rollout without exceptions; returns the index of the first non-finite
// state (0 meaning x0 itself) or npos when everything stayed finite.
inline constexpr std::size_t rollout_ok = static_cast<std::size_t>(-1);

inline std::size_t rollout_into(const State& x0, std::span<const Input> u_seq,
                                const ProxyParams& th, double dt,
                                std::vector<State>& xs) {
  xs.clear();
  xs.reserve(u_seq.size() + 1);
  xs.push_back(x0);
  if (!is_finite(x0)) return 0;
  for (std::size_t k = 0; k < u_seq.size(); ++k) {
    const State& s = xs.back();
    const Input& u = u_seq[k];
    xs.push_back({s.x + s.v * std::cos(s.psi) * dt,
                  s.y + s.v * std::sin(s.psi) * dt,
                  s.psi + s.omega * dt,
                  th.alpha_v * s.v + th.beta_v * u.thrust,
                  th.alpha_w * s.omega + th.beta_w * u.moment});
    if (!is_finite(xs.back())) return k + 1;
  }
  return rollout_ok;
}

inline Vec5 tracking_error(const State& s, const State& ref) {
  Vec5 e;
  e << s.x - ref.x, s.y - ref.y, wrap_angle(s.psi - ref.psi), s.v - ref.v,
      s.omega - ref.omega;
  return e;
}

// Cost of a rollout already known to be finite.
inline double cost_of_rollout(const CftocProblem& prob,
                              std::span<const State> xs,
                              std::span<const Input> us) {
  const std::size_t n = us.size();
  double j = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const Vec5 e = tracking_error(xs[k], prob.x_ref);
    j += 0.5 * e.dot(prob.state_weights.cwiseProduct(e));
    const Eigen::Vector2d u(us[k - 1].thrust, us[k - 1].moment);
    j += 0.5 * u.dot(prob.input_weights.cwiseProduct(u));
  }
  const Vec5 en = tracking_error(xs[n], prob.x_ref);
  j += 0.5 * en.dot(prob.terminal_weights.cwiseProduct(en));
  return j;
}

// Reverse sweep through the rollout: gradient of the cost with respect to
// the flattened input sequence (R0, M0, R1, M1, ...).
inline Eigen::VectorXd gradient_of_rollout(const CftocProblem& prob,
                                           std::span<const State> xs,
                                           std::span<const Input> us) {
  const std::size_t n = us.size();
  Eigen::VectorXd grad(2 * n);
  // lambda_k = dJ/dx_k, seeded at the terminal state with both the stage
  // and the terminal weight (the terminal error carries both terms).
  Vec5 en = tracking_error(xs[n], prob.x_ref);
  Vec5 lambda =
      (prob.state_weights + prob.terminal_weights).cwiseProduct(en);
  for (std::size_t k = n; k-- > 0;) {
    // dJ/du_k = R u_k + B^T lambda_{k+1}; B couples only the velocity rows.
    grad[2 * k] = prob.input_weights[0] * us[k].thrust +
                  prob.theta.beta_v * lambda[3];
    grad[2 * k + 1] = prob.input_weights[1] * us[k].moment +
                      prob.theta.beta_w * lambda[4];
    if (k == 0) break;
    // lambda_k = Q e_k + A_k^T lambda_{k+1}, A_k the dynamics Jacobian at x_k.
    const State& s = xs[k];
    const double c = std::cos(s.psi), sn = std::sin(s.psi);
    Vec5 next;
    next[0] = lambda[0];
    next[1] = lambda[1];
    next[2] = -s.v * sn * prob.dt * lambda[0] + s.v * c * prob.dt * lambda[1] +
              lambda[2];
    next[3] = c * prob.dt * lambda[0] + sn * prob.dt * lambda[1] +
              prob.theta.alpha_v * lambda[3];
    next[4] = prob.dt * lambda[2] + prob.theta.alpha_w * lambda[4];
    const Vec5 ek = tracking_error(s, prob.x_ref);
    lambda = prob.state_weights.cwiseProduct(ek) + next;
  }
  return grad;
}

inline void clamp_to_box(Eigen::VectorXd& z, const InputBounds& b) {
  for (Eigen::Index i = 0; i < z.size(); i += 2) {
    z[i] = std::clamp(z[i], b.lower.thrust, b.upper.thrust);
    z[i + 1] = std::clamp(z[i + 1], b.lower.moment, b.upper.moment);
  }
}

inline std::vector<Input> unflatten(const Eigen::VectorXd& z) {
  std::vector<Input> us(static_cast<std::size_t>(z.size() / 2));
  for (std::size_t k = 0; k < us.size(); ++k)
    us[k] = {z[2 * k], z[2 * k + 1]};
  return us;
}

inline void validate(const CftocProblem& prob) {
  if (prob.horizon < 1) throw DomainError("CftocProblem: horizon must be >= 1");
  if (!(std::isfinite(prob.dt) && prob.dt > 0.0))
    throw DomainError("CftocProblem: dt must be finite and > 0");
  if (!is_finite(prob.x0)) throw DomainError("CftocProblem: non-finite x0");
  if (!is_finite(prob.x_ref))
    throw DomainError("CftocProblem: non-finite x_ref");
  if (!is_finite(prob.theta))
    throw DomainError("CftocProblem: non-finite parameters");
  if ((prob.state_weights.array() < 0.0).any() ||
      (prob.terminal_weights.array() < 0.0).any() ||
      (prob.input_weights.array() < 0.0).any())
    throw DomainError("CftocProblem: weights must be non-negative");
  if (!(prob.bounds.lower.thrust <= prob.bounds.upper.thrust &&
        prob.bounds.lower.moment <= prob.bounds.upper.moment))
    throw DomainError("CftocProblem: bounds lower must be <= upper");
}

}  // namespace detail

/// Chains step_discrete through the input sequence; returns N+1 states.
/// Throws RolloutError (carrying the failing index) if a state goes
/// non-finite.
inline std::vector<State> rollout(const State& x0, std::span<const Input> u_seq,
                                  const ProxyParams& th, double dt) {
  if (u_seq.empty()) throw DomainError("rollout: empty input sequence");
  if (!(std::isfinite(dt) && dt > 0.0))
    throw DomainError("rollout: dt must be finite and > 0");
  std::vector<State> xs;
  const std::size_t bad = detail::rollout_into(x0, u_seq, th, dt, xs);
  if (bad != detail::rollout_ok)
    throw RolloutError("rollout: non-finite state at index " +
                           std::to_string(bad),
                       bad);
  return xs;
}

/// Quadratic tracking cost of an input sequence:
///   J = 1/2 e_N^T P e_N + sum_{k=1..N} (1/2 e_k^T Q e_k
///                                       + 1/2 u_{k-1}^T R u_{k-1})
/// with heading errors wrapped to (-pi, pi]. The terminal error is hit by
/// both Q and P.
inline double cost(const CftocProblem& prob, std::span<const Input> u_seq) {
  detail::validate(prob);
  if (u_seq.size() != static_cast<std::size_t>(prob.horizon))
    throw DomainError("cost: input sequence length must equal the horizon");
  const std::vector<State> xs = rollout(prob.x0, u_seq, prob.theta, prob.dt);
  return detail::cost_of_rollout(prob, xs, u_seq);
}

/// Analytic gradient of cost() with respect to the flattened input
/// sequence (R0, M0, R1, M1, ...), computed by a reverse sweep through the
/// rollout.
inline Eigen::VectorXd cost_gradient(const CftocProblem& prob,
                                     std::span<const Input> u_seq) {
  detail::validate(prob);
  if (u_seq.size() != static_cast<std::size_t>(prob.horizon))
    throw DomainError(
        "cost_gradient: input sequence length must equal the horizon");
  const std::vector<State> xs = rollout(prob.x0, u_seq, prob.theta, prob.dt);
  return detail::gradient_of_rollout(prob, xs, u_seq);
}

/// Projected-gradient solve with Armijo backtracking over the input box.
///
/// Starts from the warm start (clamped to the box) or the zero sequence.
/// Terminates when the projected-gradient norm drops below
/// options.tolerance or the iteration cap is hit; `converged` records
/// which. The cost sequence is non-increasing, so the returned cost never
/// exceeds the starting point's.
inline Solution solve(const CftocProblem& prob,
                      std::span<const Input> warm_start = {}) {
  detail::validate(prob);
  const std::size_t n = static_cast<std::size_t>(prob.horizon);
  if (!warm_start.empty() && warm_start.size() != n)
    throw DomainError("solve: warm start length must equal the horizon");

  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * n);
  for (std::size_t k = 0; k < warm_start.size(); ++k) {
    z[2 * k] = warm_start[k].thrust;
    z[2 * k + 1] = warm_start[k].moment;
  }
  detail::clamp_to_box(z, prob.bounds);

  std::vector<Input> us = detail::unflatten(z);
  std::vector<State> xs;
  if (detail::rollout_into(prob.x0, us, prob.theta, prob.dt, xs) !=
      detail::rollout_ok)
    throw SolverError("solve: rollout diverged at the starting point");
  double j = detail::cost_of_rollout(prob, xs, us);

  Solution sol;
  std::vector<Input> us_trial;
  std::vector<State> xs_trial;
  Eigen::VectorXd z_trial;
  int iter = 0;
  for (; iter < prob.options.max_iterations; ++iter) {
    const Eigen::VectorXd g = detail::gradient_of_rollout(prob, xs, us);
    Eigen::VectorXd projected = z - g;
    detail::clamp_to_box(projected, prob.bounds);
    sol.grad_norm = (z - projected).norm();
    if (sol.grad_norm <= prob.options.tolerance) {
      sol.converged = true;
      break;
    }

    double alpha = prob.options.initial_step;
    bool accepted = false;
    for (int bt = 0; bt < prob.options.max_backtracks; ++bt) {
      z_trial = z - alpha * g;
      detail::clamp_to_box(z_trial, prob.bounds);
      us_trial = detail::unflatten(z_trial);
      if (detail::rollout_into(prob.x0, us_trial, prob.theta, prob.dt,
                               xs_trial) == detail::rollout_ok) {
        const double j_trial =
            detail::cost_of_rollout(prob, xs_trial, us_trial);
        const double slope = g.dot(z_trial - z);
        if (std::isfinite(j_trial) &&
            j_trial <= j + prob.options.armijo_slope * slope) {
          z.swap(z_trial);
          us.swap(us_trial);
          xs.swap(xs_trial);
          j = j_trial;
          accepted = true;
          break;
        }
      }
      alpha *= prob.options.backtrack_shrink;
    }
    if (!accepted) break;  // no admissible decrease left at this scale
  }

  sol.u_seq = std::move(us);
  sol.x_pred = std::move(xs);
  sol.cost = j;
  sol.iterations = iter;
  return sol;
}

/// Warm start for the next receding-horizon step: drop the applied first
/// input, shift left, repeat the last input.
inline std::vector<Input> shift_warm_start(std::span<const Input> previous) {
  if (previous.empty()) return {};
  std::vector<Input> shifted(previous.begin() + 1, previous.end());
  shifted.push_back(previous.back());
  return shifted;
}

}  // namespace ampc

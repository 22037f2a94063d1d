#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "ampc/errors.hpp"

namespace ampc {

/// State of the planar knife-edge robot.
///
/// The heading is stored unwrapped; dynamics never reduce it modulo 2*pi.
/// Use wrap_angle() when forming heading errors.
struct State {
  double x{0.0};      // position [m]
  double y{0.0};      // position [m]
  double psi{0.0};    // heading [rad], unwrapped
  double v{0.0};      // longitudinal speed [m/s]
  double omega{0.0};  // yaw rate [rad/s]

  // World-frame velocity implied by the rolling constraint.
  double xdot() const { return v * std::cos(psi); }
  double ydot() const { return v * std::sin(psi); }
};

/// Control input: thrust along the heading and a yaw moment.
struct Input {
  double thrust{0.0};  // R [N]
  double moment{0.0};  // M [N m]
};

/// Time derivative of State under the continuous dynamics.
struct StateDerivative {
  double x{0.0};      // [m/s]
  double y{0.0};      // [m/s]
  double psi{0.0};    // [rad/s]
  double v{0.0};      // [m/s^2]
  double omega{0.0};  // [rad/s^2]
};

/// Physical parameters of the robot.
struct PhysicalParams {
  double mass{5.0};          // m [kg]
  double linear_drag{0.1};   // b [kg/s]
  double inertia{0.2};       // J [kg m^2]
  double angular_drag{0.1};  // c [kg m^2/s]
};

/// Discrete-time velocity-channel parameters.
///
/// The Euler-discretized velocity rows become linear in these:
///   v'     = alpha_v * v     + beta_v * R
///   omega' = alpha_w * omega + beta_w * M
/// For a physical plant beta_v, beta_w > 0 and alpha <= 1, but estimates
/// produced online may transiently violate that; validity is only enforced
/// where a physical interpretation is required (from_proxy).
struct ProxyParams {
  double alpha_v{1.0};  // dimensionless
  double beta_v{0.1};   // [s/kg]
  double alpha_w{1.0};  // dimensionless
  double beta_w{0.1};   // [s/(kg m^2)]
};

inline bool is_finite(const State& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.psi) &&
         std::isfinite(s.v) && std::isfinite(s.omega);
}

inline bool is_finite(const Input& u) {
  return std::isfinite(u.thrust) && std::isfinite(u.moment);
}

inline bool is_finite(const ProxyParams& th) {
  return std::isfinite(th.alpha_v) && std::isfinite(th.beta_v) &&
         std::isfinite(th.alpha_w) && std::isfinite(th.beta_w);
}

/// Throws DomainError unless mass and inertia are positive, drags
/// non-negative, and everything finite.
inline void validate(const PhysicalParams& p) {
  if (!(std::isfinite(p.mass) && p.mass > 0.0))
    throw DomainError("PhysicalParams: mass must be finite and > 0");
  if (!(std::isfinite(p.inertia) && p.inertia > 0.0))
    throw DomainError("PhysicalParams: inertia must be finite and > 0");
  if (!(std::isfinite(p.linear_drag) && p.linear_drag >= 0.0))
    throw DomainError("PhysicalParams: linear_drag must be finite and >= 0");
  if (!(std::isfinite(p.angular_drag) && p.angular_drag >= 0.0))
    throw DomainError("PhysicalParams: angular_drag must be finite and >= 0");
}

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

/// Right-hand side of the continuous knife-edge dynamics:
///   (v cos psi, v sin psi, omega, (R - b v)/m, (M - c omega)/J).
inline StateDerivative continuous_derivative(const State& s, const Input& u,
                                             const PhysicalParams& p) {
  validate(p);
  if (!is_finite(s)) throw DomainError("continuous_derivative: non-finite state");
  if (!is_finite(u)) throw DomainError("continuous_derivative: non-finite input");
  return {s.v * std::cos(s.psi), s.v * std::sin(s.psi), s.omega,
          (u.thrust - p.linear_drag * s.v) / p.mass,
          (u.moment - p.angular_drag * s.omega) / p.inertia};
}

/// One Euler step of the discrete dynamics with proxy velocity parameters.
/// Inputs are held constant over the interval (zero-order hold).
inline State step_discrete(const State& s, const Input& u,
                           const ProxyParams& th, double dt) {
  if (!(std::isfinite(dt) && dt > 0.0))
    throw DomainError("step_discrete: dt must be finite and > 0");
  if (!is_finite(s)) throw DomainError("step_discrete: non-finite state");
  if (!is_finite(u)) throw DomainError("step_discrete: non-finite input");
  if (!is_finite(th)) throw DomainError("step_discrete: non-finite parameters");
  return {s.x + s.v * std::cos(s.psi) * dt,
          s.y + s.v * std::sin(s.psi) * dt,
          s.psi + s.omega * dt,
          th.alpha_v * s.v + th.beta_v * u.thrust,
          th.alpha_w * s.omega + th.beta_w * u.moment};
}

/// Proxy parameters equivalent to (m, b, J, c) at sampling interval dt.
inline ProxyParams to_proxy(const PhysicalParams& p, double dt) {
  validate(p);
  if (!(std::isfinite(dt) && dt > 0.0))
    throw DomainError("to_proxy: dt must be finite and > 0");
  return {1.0 - p.linear_drag * dt / p.mass, dt / p.mass,
          1.0 - p.angular_drag * dt / p.inertia, dt / p.inertia};
}

/// Inverts to_proxy. Throws DomainError when beta_v or beta_w is not
/// positive (the estimate has no physical interpretation yet).
inline PhysicalParams from_proxy(const ProxyParams& th, double dt) {
  if (!(std::isfinite(dt) && dt > 0.0))
    throw DomainError("from_proxy: dt must be finite and > 0");
  if (!is_finite(th)) throw DomainError("from_proxy: non-finite parameters");
  if (!(th.beta_v > 0.0))
    throw DomainError("from_proxy: beta_v must be > 0 to invert");
  if (!(th.beta_w > 0.0))
    throw DomainError("from_proxy: beta_w must be > 0 to invert");
  return {dt / th.beta_v, (1.0 - th.alpha_v) / th.beta_v,
          dt / th.beta_w, (1.0 - th.alpha_w) / th.beta_w};
}

/// Lateral-velocity residual -xdot sin psi + ydot cos psi with
/// (xdot, ydot) from the model. Zero up to rounding for every state; kept
/// as a literal two-term expression so it works as a diagnostic.
inline double constraint_residual(const State& s) {
  return -(s.v * std::cos(s.psi)) * std::sin(s.psi) +
         (s.v * std::sin(s.psi)) * std::cos(s.psi);
}

/// Lateral friction force (the constraint multiplier): m * omega * v.
inline double lateral_force(const State& s, const PhysicalParams& p) {
  validate(p);
  return p.mass * s.omega * s.v;
}

}  // namespace ampc

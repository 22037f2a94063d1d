#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ampc/errors.hpp"
#include "ampc/model.hpp"

namespace ampc {

/// Regressor for one velocity channel: (previous channel velocity,
/// previous channel input). Its inner product with the channel parameters
/// predicts the next channel value.
struct Regressor {
  Eigen::Vector2d phi{0.0, 0.0};
};

/// Recursive-least-squares estimate for one velocity channel.
struct ChannelEstimate {
  Eigen::Vector2d theta_hat{1.0, 0.1};                   // (alpha_hat, beta_hat)
  Eigen::Matrix2d gain{Eigen::Matrix2d::Identity() * 100.0};  // F, symmetric PSD
};

/// Estimates for both decoupled channels.
struct EstimatorState {
  ChannelEstimate v_channel;
  ChannelEstimate w_channel;
};

inline ChannelEstimate make_channel_estimate(const Eigen::Vector2d& theta0,
                                             double initial_gain) {
  if (!(std::isfinite(initial_gain) && initial_gain > 0.0))
    throw DomainError("make_channel_estimate: initial gain must be > 0");
  if (!theta0.allFinite())
    throw DomainError("make_channel_estimate: non-finite initial estimate");
  return {theta0, Eigen::Matrix2d::Identity() * initial_gain};
}

/// One-step prediction of the channel value: theta_hat . phi.
inline double predict(const ChannelEstimate& est, const Regressor& phi) {
  return est.theta_hat.dot(phi.phi);
}

/// Series-parallel RLS update.
///
/// The gain is contracted first and the new gain drives the parameter
/// correction:
///   eps0  = measured_next - theta_hat . phi
///   F+    = F - (F phi)(F phi)^T / (1 + phi^T F phi)
///   theta+ = theta_hat + F+ phi eps0
/// A zero regressor leaves the estimate untouched. The rank-one outer
/// product keeps F exactly symmetric in floating point.
inline ChannelEstimate update(const ChannelEstimate& est, const Regressor& phi,
                              double measured_next) {
  if (!std::isfinite(measured_next))
    throw DomainError("update: non-finite measurement");
  if (!phi.phi.allFinite()) throw DomainError("update: non-finite regressor");
  const double eps0 = measured_next - predict(est, phi);
  const Eigen::Vector2d k = est.gain * phi.phi;
  const Eigen::Matrix2d gain_next =
      est.gain - (k * k.transpose()) / (1.0 + phi.phi.dot(k));
  const Eigen::Vector2d theta_next = est.theta_hat + gain_next * phi.phi * eps0;
  return {theta_next, gain_next};
}

/// Regressor of the longitudinal channel: (v, R).
inline Regressor regressor_v(const State& prev_state, const Input& prev_input) {
  return {{prev_state.v, prev_input.thrust}};
}

/// Regressor of the yaw channel: (omega, M).
inline Regressor regressor_w(const State& prev_state, const Input& prev_input) {
  return {{prev_state.omega, prev_input.moment}};
}

/// Proxy parameters corresponding to the current estimates.
inline ProxyParams current_proxy(const EstimatorState& est) {
  return {est.v_channel.theta_hat[0], est.v_channel.theta_hat[1],
          est.w_channel.theta_hat[0], est.w_channel.theta_hat[1]};
}

}  // namespace ampc

#pragma once

#include <cmath>
#include <span>

#include "scenred/error.hpp"
#include "scenred/nn_layers.hpp"

namespace scenred::nn {

struct AdaDeltaConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
};

namespace detail {

/// The AdaDelta recurrences, applied in place:
///   E[g^2]  <- rho E[g^2] + (1-rho) g^2
///   dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1-rho) dx^2
///   x       <- x + dx
inline void adadelta_update(std::span<double> params, std::span<const double> grads,
                            std::span<double> acc_grad_sq, std::span<double> acc_update_sq,
                            double rho, double epsilon) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    acc_grad_sq[i] = rho * acc_grad_sq[i] + (1.0 - rho) * g * g;
    const double dx = -std::sqrt(acc_update_sq[i] + epsilon) / std::sqrt(acc_grad_sq[i] + epsilon) * g;
    acc_update_sq[i] = rho * acc_update_sq[i] + (1.0 - rho) * dx * dx;
    params[i] += dx;
  }
}

}  // namespace detail

inline void adadelta_step(LayerParams& params, const AdaDeltaConfig& cfg = {}) {
  if (!(cfg.rho > 0.0 && cfg.rho < 1.0))
    fail(ErrorKind::InvalidArgument, "adadelta rho must lie in (0, 1)");
  if (!(cfg.epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "adadelta epsilon must be positive");
  if (!params.has_gradient)
    fail(ErrorKind::UninitializedGradient, "adadelta step requires a populated gradient");
  detail::adadelta_update(params.weights, params.grad_w, params.acc_grad_sq_w, params.acc_update_sq_w,
                          cfg.rho, cfg.epsilon);
  detail::adadelta_update(params.biases, params.grad_b, params.acc_grad_sq_b, params.acc_update_sq_b,
                          cfg.rho, cfg.epsilon);
}

}  // namespace scenred::nn

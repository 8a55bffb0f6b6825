#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "scenred/nn_layers.hpp"
#include "scenred/tensor.hpp"

namespace scenred::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double tolerance = 1e-4;
  bool pass = true;
};

namespace detail {

inline double rel_error(double analytic, double numeric) {
  const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / denom;
}

}  // namespace detail

/// Central-difference check of an analytic gradient. `loss` is re-evaluated
/// while the entries of `x` are perturbed in place; `analytic` holds d loss /
/// d x at the unperturbed point. Relative error is measured against
/// max(1, |analytic|, |numeric|).
template <typename LossFn>
GradCheckReport finite_diff_gradcheck(LossFn&& loss, std::span<double> x,
                                      std::span<const double> analytic, double step = 1e-5,
                                      double tolerance = 1e-4) {
  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double f_plus = loss();
    x[i] = saved - step;
    const double f_minus = loss();
    x[i] = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * step);
    report.max_rel_error = std::max(report.max_rel_error, detail::rel_error(analytic[i], numeric));
  }
  report.pass = report.max_rel_error < tolerance;
  return report;
}

/// Checks every gradient a layer produces — input gradient, and weight/bias
/// gradients when the layer is parametric — against central differences of
/// the scalar loss sum(forward(input) * projection).
template <typename Layer>
GradCheckReport gradcheck_layer(Layer& layer, Tensor3 input, const Tensor3& projection,
                                double step = 1e-5, double tolerance = 1e-4) {
  const auto loss = [&]() {
    const Tensor3& out = layer.forward(input);
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) total += out.data[i] * projection.data[i];
    return total;
  };

  constexpr bool parametric = requires { layer.params(); };
  if constexpr (parametric) layer.params().zero_grad();
  layer.forward(input);
  const Tensor3 d_input = layer.backward(projection);

  GradCheckReport report =
      finite_diff_gradcheck(loss, std::span<double>(input.data), d_input.data, step, tolerance);

  if constexpr (parametric) {
    const std::vector<double> analytic_w = layer.params().grad_w;
    const std::vector<double> analytic_b = layer.params().grad_b;
    const GradCheckReport wr = finite_diff_gradcheck(loss, std::span<double>(layer.params().weights),
                                                     analytic_w, step, tolerance);
    const GradCheckReport br = finite_diff_gradcheck(loss, std::span<double>(layer.params().biases),
                                                     analytic_b, step, tolerance);
    report.max_rel_error = std::max({report.max_rel_error, wr.max_rel_error, br.max_rel_error});
    report.pass = report.max_rel_error < tolerance;
  }
  return report;
}

}  // namespace scenred::nn

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "scenred/error.hpp"
#include "scenred/rng.hpp"
#include "scenred/tensor.hpp"

namespace scenred::nn {

/// Trainable parameters with their gradient buffers and AdaDelta accumulators.
/// All auxiliary arrays are sized with the parameters at allocation time.
struct LayerParams {
  std::vector<double> weights;
  std::vector<double> biases;
  std::vector<double> grad_w;
  std::vector<double> grad_b;
  std::vector<double> acc_grad_sq_w;    // E[g^2]
  std::vector<double> acc_grad_sq_b;
  std::vector<double> acc_update_sq_w;  // E[dx^2]
  std::vector<double> acc_update_sq_b;
  bool has_gradient = false;

  void allocate(std::size_t n_weights, std::size_t n_biases) {
    weights.assign(n_weights, 0.0);
    biases.assign(n_biases, 0.0);
    grad_w.assign(n_weights, 0.0);
    grad_b.assign(n_biases, 0.0);
    acc_grad_sq_w.assign(n_weights, 0.0);
    acc_grad_sq_b.assign(n_biases, 0.0);
    acc_update_sq_w.assign(n_weights, 0.0);
    acc_update_sq_b.assign(n_biases, 0.0);
    has_gradient = false;
  }

  void zero_grad() {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    has_gradient = false;
  }

  std::size_t parameter_count() const { return weights.size() + biases.size(); }
};

namespace detail {

inline void glorot_uniform(std::vector<double>& weights, std::size_t fan_in, std::size_t fan_out,
                           Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& w : weights) w = rng.uniform(-limit, limit);
}

}  // namespace detail

/// 2-D cross-correlation with same-zero padding on both axes and stride 1, so
/// output height and width equal the input's. Filter width must be odd for a
/// symmetric horizontal pad. Gradients accumulate across backward calls until
/// zero_grad(). backward() skips the input gradient when compute_input_grad
/// is off (the usual case for a network's first layer).
class ConvLayer {
 public:
  ConvLayer(int filter_height, int filter_width, int in_channels, int out_channels)
      : fh_(filter_height), fw_(filter_width), cin_(in_channels), cout_(out_channels) {
    if (fh_ < 1 || fw_ < 1 || cin_ < 1 || cout_ < 1)
      fail(ErrorKind::ShapeMismatch, "convolution dimensions must be positive");
    if (fw_ % 2 == 0)
      fail(ErrorKind::EvenFilterWidth, "filter width " + std::to_string(fw_) + " must be odd");
    params_.allocate(static_cast<std::size_t>(fh_) * fw_ * cin_ * cout_,
                     static_cast<std::size_t>(cout_));
  }

  void init_weights(Rng& rng) {
    detail::glorot_uniform(params_.weights, static_cast<std::size_t>(fh_) * fw_ * cin_,
                           static_cast<std::size_t>(fh_) * fw_ * cout_, rng);
  }

  const Tensor3& forward(const Tensor3& input) {
    if (input.channels != cin_)
      fail(ErrorKind::ShapeMismatch, "conv expects " + std::to_string(cin_) + " input channels, got " +
                                         std::to_string(input.channels));
    input_ = input;
    has_cache_ = true;
    const int h = input.height;
    const int w = input.width;
    const int pad_y = (fh_ - 1) / 2;
    const int pad_x = (fw_ - 1) / 2;
    output_.ensure_shape(h, w, cout_);
    const double* wts = params_.weights.data();
    const double* bias = params_.biases.data();
    for (int y = 0; y < h; ++y) {
      const int ky_lo = std::max(0, pad_y - y);
      const int ky_hi = std::min(fh_ - 1, h - 1 + pad_y - y);
      for (int x = 0; x < w; ++x) {
        double* out_px = &output_.data[(static_cast<std::size_t>(y) * w + x) * cout_];
        for (int co = 0; co < cout_; ++co) out_px[co] = bias[co];
        const int kx_lo = std::max(0, pad_x - x);
        const int kx_hi = std::min(fw_ - 1, w - 1 + pad_x - x);
        for (int ky = ky_lo; ky <= ky_hi; ++ky) {
          const int iy = y - pad_y + ky;
          for (int kx = kx_lo; kx <= kx_hi; ++kx) {
            const int ix = x - pad_x + kx;
            const double* in_px = &input_.data[(static_cast<std::size_t>(iy) * w + ix) * cin_];
            const double* w_px = wts + (static_cast<std::size_t>(ky) * fw_ + kx) * cin_ * cout_;
            for (int ci = 0; ci < cin_; ++ci) {
              const double v = in_px[ci];
              const double* w_row = w_px + static_cast<std::size_t>(ci) * cout_;
              for (int co = 0; co < cout_; ++co) out_px[co] += v * w_row[co];
            }
          }
        }
      }
    }
    return output_;
  }

  const Tensor3& backward(const Tensor3& d_out) {
    if (!has_cache_) fail(ErrorKind::MissingForwardCache, "conv backward before forward");
    if (!d_out.same_shape(output_))
      fail(ErrorKind::ShapeMismatch, "conv upstream gradient shape " + d_out.shape_string() +
                                         " does not match output " + output_.shape_string());
    const int h = input_.height;
    const int w = input_.width;
    const int pad_y = (fh_ - 1) / 2;
    const int pad_x = (fw_ - 1) / 2;
    double* gw = params_.grad_w.data();
    double* gb = params_.grad_b.data();

    for (int y = 0; y < h; ++y) {
      const int ky_lo = std::max(0, pad_y - y);
      const int ky_hi = std::min(fh_ - 1, h - 1 + pad_y - y);
      for (int x = 0; x < w; ++x) {
        const double* go = &d_out.data[(static_cast<std::size_t>(y) * w + x) * cout_];
        for (int co = 0; co < cout_; ++co) gb[co] += go[co];
        const int kx_lo = std::max(0, pad_x - x);
        const int kx_hi = std::min(fw_ - 1, w - 1 + pad_x - x);
        for (int ky = ky_lo; ky <= ky_hi; ++ky) {
          const int iy = y - pad_y + ky;
          for (int kx = kx_lo; kx <= kx_hi; ++kx) {
            const int ix = x - pad_x + kx;
            const double* in_px = &input_.data[(static_cast<std::size_t>(iy) * w + ix) * cin_];
            double* gw_px = gw + (static_cast<std::size_t>(ky) * fw_ + kx) * cin_ * cout_;
            for (int ci = 0; ci < cin_; ++ci) {
              const double v = in_px[ci];
              double* gw_row = gw_px + static_cast<std::size_t>(ci) * cout_;
              for (int co = 0; co < cout_; ++co) gw_row[co] += v * go[co];
            }
          }
        }
      }
    }

    if (compute_input_grad) {
      // Transposed weight copy puts ci innermost so the scatter loop below
      // walks contiguous memory.
      wt_scratch_.assign(params_.weights.size(), 0.0);
      for (int k = 0; k < fh_ * fw_; ++k)
        for (int ci = 0; ci < cin_; ++ci)
          for (int co = 0; co < cout_; ++co)
            wt_scratch_[(static_cast<std::size_t>(k) * cout_ + co) * cin_ + ci] =
                params_.weights[(static_cast<std::size_t>(k) * cin_ + ci) * cout_ + co];

      d_input_.ensure_shape(h, w, cin_);
      std::fill(d_input_.data.begin(), d_input_.data.end(), 0.0);
      for (int y = 0; y < h; ++y) {
        const int ky_lo = std::max(0, pad_y - y);
        const int ky_hi = std::min(fh_ - 1, h - 1 + pad_y - y);
        for (int x = 0; x < w; ++x) {
          const double* go = &d_out.data[(static_cast<std::size_t>(y) * w + x) * cout_];
          const int kx_lo = std::max(0, pad_x - x);
          const int kx_hi = std::min(fw_ - 1, w - 1 + pad_x - x);
          for (int ky = ky_lo; ky <= ky_hi; ++ky) {
            const int iy = y - pad_y + ky;
            for (int kx = kx_lo; kx <= kx_hi; ++kx) {
              const int ix = x - pad_x + kx;
              double* din_px = &d_input_.data[(static_cast<std::size_t>(iy) * w + ix) * cin_];
              const double* wt_px =
                  wt_scratch_.data() + (static_cast<std::size_t>(ky) * fw_ + kx) * cout_ * cin_;
              for (int co = 0; co < cout_; ++co) {
                const double g = go[co];
                const double* wt_row = wt_px + static_cast<std::size_t>(co) * cin_;
                for (int ci = 0; ci < cin_; ++ci) din_px[ci] += g * wt_row[ci];
              }
            }
          }
        }
      }
    }
    params_.has_gradient = true;
    return d_input_;
  }

  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }
  int filter_height() const { return fh_; }
  int filter_width() const { return fw_; }
  int in_channels() const { return cin_; }
  int out_channels() const { return cout_; }

  bool compute_input_grad = true;

 private:
  int fh_, fw_, cin_, cout_;
  LayerParams params_;
  Tensor3 input_;
  Tensor3 output_;
  Tensor3 d_input_;
  std::vector<double> wt_scratch_;
  bool has_cache_ = false;
};

/// Average pooling over 1 x pool_width windows: width shrinks by the pool
/// factor, height and channels pass through. The input width must be an exact
/// multiple of the pool width.
class AvgPoolLayer {
 public:
  explicit AvgPoolLayer(int pool_width) : pool_w_(pool_width) {
    if (pool_w_ < 1) fail(ErrorKind::InvalidArgument, "pool width must be at least 1");
  }

  const Tensor3& forward(const Tensor3& input) {
    if (input.width % pool_w_ != 0)
      fail(ErrorKind::WidthNotDivisible, "input width " + std::to_string(input.width) +
                                             " is not divisible by pool width " + std::to_string(pool_w_));
    in_height_ = input.height;
    in_width_ = input.width;
    channels_ = input.channels;
    has_cache_ = true;
    const int out_w = input.width / pool_w_;
    output_.ensure_shape(input.height, out_w, channels_);
    const double inv = 1.0 / pool_w_;
    for (int y = 0; y < input.height; ++y) {
      for (int ox = 0; ox < out_w; ++ox) {
        double* out_px = &output_.data[(static_cast<std::size_t>(y) * out_w + ox) * channels_];
        for (int c = 0; c < channels_; ++c) out_px[c] = 0.0;
        for (int k = 0; k < pool_w_; ++k) {
          const double* in_px =
              &input.data[(static_cast<std::size_t>(y) * input.width + ox * pool_w_ + k) * channels_];
          for (int c = 0; c < channels_; ++c) out_px[c] += in_px[c];
        }
        for (int c = 0; c < channels_; ++c) out_px[c] *= inv;
      }
    }
    return output_;
  }

  const Tensor3& backward(const Tensor3& d_out) {
    if (!has_cache_) fail(ErrorKind::MissingForwardCache, "pool backward before forward");
    if (!d_out.same_shape(output_))
      fail(ErrorKind::ShapeMismatch, "pool upstream gradient shape " + d_out.shape_string() +
                                         " does not match output " + output_.shape_string());
    d_input_.ensure_shape(in_height_, in_width_, channels_);
    const int out_w = in_width_ / pool_w_;
    const double inv = 1.0 / pool_w_;
    for (int y = 0; y < in_height_; ++y) {
      for (int ox = 0; ox < out_w; ++ox) {
        const double* go = &d_out.data[(static_cast<std::size_t>(y) * out_w + ox) * channels_];
        for (int k = 0; k < pool_w_; ++k) {
          double* din_px =
              &d_input_.data[(static_cast<std::size_t>(y) * in_width_ + ox * pool_w_ + k) * channels_];
          for (int c = 0; c < channels_; ++c) din_px[c] = go[c] * inv;
        }
      }
    }
    return d_input_;
  }

  int pool_width() const { return pool_w_; }

 private:
  int pool_w_;
  int in_height_ = 0, in_width_ = 0, channels_ = 0;
  Tensor3 output_;
  Tensor3 d_input_;
  bool has_cache_ = false;
};

/// Position-wise dense layer: one affine map over channels, applied
/// identically at every (row, column) position.
class DenseLayer {
 public:
  DenseLayer(int in_channels, int out_channels) : cin_(in_channels), cout_(out_channels) {
    if (cin_ < 1 || cout_ < 1) fail(ErrorKind::ShapeMismatch, "dense channel counts must be positive");
    params_.allocate(static_cast<std::size_t>(cin_) * cout_, static_cast<std::size_t>(cout_));
  }

  void init_weights(Rng& rng) {
    detail::glorot_uniform(params_.weights, static_cast<std::size_t>(cin_),
                           static_cast<std::size_t>(cout_), rng);
  }

  const Tensor3& forward(const Tensor3& input) {
    if (input.channels != cin_)
      fail(ErrorKind::ShapeMismatch, "dense expects " + std::to_string(cin_) + " input channels, got " +
                                         std::to_string(input.channels));
    input_ = input;
    has_cache_ = true;
    output_.ensure_shape(input.height, input.width, cout_);
    const std::size_t positions = static_cast<std::size_t>(input.height) * input.width;
    const double* wts = params_.weights.data();
    const double* bias = params_.biases.data();
    for (std::size_t p = 0; p < positions; ++p) {
      const double* in_px = &input_.data[p * cin_];
      double* out_px = &output_.data[p * cout_];
      for (int co = 0; co < cout_; ++co) out_px[co] = bias[co];
      for (int ci = 0; ci < cin_; ++ci) {
        const double v = in_px[ci];
        const double* w_row = wts + static_cast<std::size_t>(ci) * cout_;
        for (int co = 0; co < cout_; ++co) out_px[co] += v * w_row[co];
      }
    }
    return output_;
  }

  const Tensor3& backward(const Tensor3& d_out) {
    if (!has_cache_) fail(ErrorKind::MissingForwardCache, "dense backward before forward");
    if (!d_out.same_shape(output_))
      fail(ErrorKind::ShapeMismatch, "dense upstream gradient shape " + d_out.shape_string() +
                                         " does not match output " + output_.shape_string());
    const std::size_t positions = static_cast<std::size_t>(input_.height) * input_.width;
    double* gw = params_.grad_w.data();
    double* gb = params_.grad_b.data();

    wt_scratch_.assign(params_.weights.size(), 0.0);
    for (int ci = 0; ci < cin_; ++ci)
      for (int co = 0; co < cout_; ++co)
        wt_scratch_[static_cast<std::size_t>(co) * cin_ + ci] =
            params_.weights[static_cast<std::size_t>(ci) * cout_ + co];

    d_input_.ensure_shape(input_.height, input_.width, cin_);
    for (std::size_t p = 0; p < positions; ++p) {
      const double* in_px = &input_.data[p * cin_];
      const double* go = &d_out.data[p * cout_];
      double* din_px = &d_input_.data[p * cin_];
      for (int co = 0; co < cout_; ++co) gb[co] += go[co];
      for (int ci = 0; ci < cin_; ++ci) {
        const double v = in_px[ci];
        double* gw_row = gw + static_cast<std::size_t>(ci) * cout_;
        for (int co = 0; co < cout_; ++co) gw_row[co] += v * go[co];
      }
      for (int ci = 0; ci < cin_; ++ci) din_px[ci] = 0.0;
      for (int co = 0; co < cout_; ++co) {
        const double g = go[co];
        const double* wt_row = wt_scratch_.data() + static_cast<std::size_t>(co) * cin_;
        for (int ci = 0; ci < cin_; ++ci) din_px[ci] += g * wt_row[ci];
      }
    }
    params_.has_gradient = true;
    return d_input_;
  }

  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }
  int in_channels() const { return cin_; }
  int out_channels() const { return cout_; }

 private:
  int cin_, cout_;
  LayerParams params_;
  Tensor3 input_;
  Tensor3 output_;
  Tensor3 d_input_;
  std::vector<double> wt_scratch_;
  bool has_cache_ = false;
};

/// Elementwise max(0, x). The backward mask comes from the cached output.
class ReluLayer {
 public:
  const Tensor3& forward(const Tensor3& input) {
    output_.ensure_shape(input.height, input.width, input.channels);
    for (std::size_t i = 0; i < input.size(); ++i) output_.data[i] = std::max(0.0, input.data[i]);
    has_cache_ = true;
    return output_;
  }

  const Tensor3& backward(const Tensor3& d_out) {
    if (!has_cache_) fail(ErrorKind::MissingForwardCache, "relu backward before forward");
    if (!d_out.same_shape(output_))
      fail(ErrorKind::ShapeMismatch, "relu upstream gradient shape mismatch");
    d_input_.ensure_shape(output_.height, output_.width, output_.channels);
    for (std::size_t i = 0; i < output_.size(); ++i)
      d_input_.data[i] = output_.data[i] > 0.0 ? d_out.data[i] : 0.0;
    return d_input_;
  }

 private:
  Tensor3 output_;
  Tensor3 d_input_;
  bool has_cache_ = false;
};

/// Elementwise logistic sigmoid 1 / (1 + e^-x); backward uses out * (1 - out).
class SigmoidLayer {
 public:
  const Tensor3& forward(const Tensor3& input) {
    output_.ensure_shape(input.height, input.width, input.channels);
    for (std::size_t i = 0; i < input.size(); ++i)
      output_.data[i] = 1.0 / (1.0 + std::exp(-input.data[i]));
    has_cache_ = true;
    return output_;
  }

  const Tensor3& backward(const Tensor3& d_out) {
    if (!has_cache_) fail(ErrorKind::MissingForwardCache, "sigmoid backward before forward");
    if (!d_out.same_shape(output_))
      fail(ErrorKind::ShapeMismatch, "sigmoid upstream gradient shape mismatch");
    d_input_.ensure_shape(output_.height, output_.width, output_.channels);
    for (std::size_t i = 0; i < output_.size(); ++i) {
      const double s = output_.data[i];
      d_input_.data[i] = d_out.data[i] * s * (1.0 - s);
    }
    return d_input_;
  }

 private:
  Tensor3 output_;
  Tensor3 d_input_;
  bool has_cache_ = false;
};

/// Predictions are clamped to [kBceClamp, 1 - kBceClamp] before the logs.
inline constexpr double kBceClamp = 1e-7;

/// Mean binary cross-entropy over all elements,
///   L = mean( -[y ln p + (1-y) ln(1-p)] ),
/// with the gradient of the mean written to *grad when supplied. The gradient
/// is exactly that of the clamped loss: zero where the clamp is active.
inline double bce_loss(const Tensor3& pred, const Tensor3& target, Tensor3* grad = nullptr) {
  if (!pred.same_shape(target))
    fail(ErrorKind::ShapeMismatch, "bce prediction shape " + pred.shape_string() +
                                       " does not match target " + target.shape_string());
  const std::size_t n = pred.size();
  if (grad) grad->ensure_shape(pred.height, pred.width, pred.channels);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = target.data[i];
    if (y < 0.0 || y > 1.0)
      fail(ErrorKind::InvalidArgument, "bce target " + std::to_string(y) + " outside [0, 1]");
    const double raw = pred.data[i];
    const double p = std::clamp(raw, kBceClamp, 1.0 - kBceClamp);
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    if (grad) {
      const bool interior = raw > kBceClamp && raw < 1.0 - kBceClamp;
      grad->data[i] = interior ? inv_n * (p - y) / (p * (1.0 - p)) : 0.0;
    }
  }
  return total * inv_n;
}

}  // namespace scenred::nn

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scenred/error.hpp"

namespace scenred::nn {

/// Dense height x width x channels array, row-major with channels innermost.
struct Tensor3 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int h, int w, int c)
      : height(h), width(w), channels(c), data(static_cast<std::size_t>(h) * w * c, 0.0) {
    if (h < 1 || w < 1 || c < 1)
      fail(ErrorKind::ShapeMismatch, "tensor dimensions must be positive");
  }

  std::size_t size() const { return data.size(); }

  std::size_t index(int y, int x, int ch) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + ch;
  }

  double& at(int y, int x, int ch) { return data[index(y, x, ch)]; }
  double at(int y, int x, int ch) const { return data[index(y, x, ch)]; }

  bool same_shape(const Tensor3& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }

  void resize(int h, int w, int c) {
    height = h;
    width = w;
    channels = c;
    data.assign(static_cast<std::size_t>(h) * w * c, 0.0);
  }

  /// Reallocates only on a shape change; existing contents are otherwise kept.
  void ensure_shape(int h, int w, int c) {
    if (height != h || width != w || channels != c) resize(h, w, c);
  }

  std::string shape_string() const {
    return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
  }

  bool operator==(const Tensor3&) const = default;
};

}  // namespace scenred::nn

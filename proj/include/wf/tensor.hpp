#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wf/errors.hpp"

namespace wf {

// Dense video tensor, dims (T, C, H, W), row-major with frame outermost.
// Values are stored as float; file IO preserves 32-bit IEEE-754 bits.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int frames, int channels, int height, int width);
  FeatureMap(int frames, int channels, int height, int width,
             std::vector<float> data);

  int frames() const { return t_; }
  int channels() const { return c_; }
  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return data_.size(); }

  float at(int t, int c, int i, int j) const {
    return data_[index(t, c, i, j)];
  }
  float& at(int t, int c, int i, int j) { return data_[index(t, c, i, j)]; }

  // One frame: C*H*W contiguous values.
  std::span<const float> frame(int t) const {
    return {data_.data() + static_cast<std::size_t>(t) * frame_size(),
            frame_size()};
  }
  std::span<float> frame(int t) {
    return {data_.data() + static_cast<std::size_t>(t) * frame_size(),
            frame_size()};
  }
  // One channel plane of one frame: H*W contiguous values.
  std::span<const float> plane(int t, int c) const {
    return {data_.data() + index(t, c, 0, 0),
            static_cast<std::size_t>(h_) * w_};
  }
  std::span<float> plane(int t, int c) {
    return {data_.data() + index(t, c, 0, 0),
            static_cast<std::size_t>(h_) * w_};
  }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  std::size_t frame_size() const {
    return static_cast<std::size_t>(c_) * h_ * w_;
  }
  std::size_t index(int t, int c, int i, int j) const {
    return ((static_cast<std::size_t>(t) * c_ + c) * h_ + i) * w_ + j;
  }

  bool same_dims(const FeatureMap& other) const {
    return t_ == other.t_ && c_ == other.c_ && h_ == other.h_ &&
           w_ == other.w_;
  }

 private:
  int t_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<float> data_;
};

// Per-pixel observedness, dims (T, H, W), values in [0, 1].
// 1 means observed, 0 means missing (out of bounds after a warp).
class ValidityMask {
 public:
  ValidityMask() = default;
  ValidityMask(int frames, int height, int width, float fill);
  ValidityMask(int frames, int height, int width, std::vector<float> data);

  static ValidityMask ones(int frames, int height, int width) {
    return ValidityMask(frames, height, width, 1.0f);
  }

  int frames() const { return t_; }
  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return data_.size(); }

  float at(int t, int i, int j) const { return data_[index(t, i, j)]; }
  float& at(int t, int i, int j) { return data_[index(t, i, j)]; }

  std::span<const float> frame(int t) const {
    return {data_.data() + static_cast<std::size_t>(t) * h_ * w_,
            static_cast<std::size_t>(h_) * w_};
  }
  std::span<float> frame(int t) {
    return {data_.data() + static_cast<std::size_t>(t) * h_ * w_,
            static_cast<std::size_t>(h_) * w_};
  }

  const std::vector<float>& data() const { return data_; }

  std::size_t index(int t, int i, int j) const {
    return (static_cast<std::size_t>(t) * h_ + i) * w_ + j;
  }

 private:
  int t_ = 0, h_ = 0, w_ = 0;
  std::vector<float> data_;
};

// Axis-aligned rectangle in continuous pixel coordinates where integer
// coordinates are pixel centers: the full H x W frame is
// (0, 0) .. (H-1, W-1). Optionally tied to a frame index.
struct BoundingBox {
  double y0 = 0.0, x0 = 0.0, y1 = 0.0, x1 = 0.0;
  std::optional<int> t;

  double height() const { return y1 - y0; }
  double width() const { return x1 - x0; }
  double area() const { return height() * width(); }
  bool well_formed() const { return y0 < y1 && x0 < x1; }
  bool intersects_frame(int frame_height, int frame_width) const {
    return well_formed() && y1 > 0.0 && x1 > 0.0 &&
           y0 < static_cast<double>(frame_height - 1) &&
           x0 < static_cast<double>(frame_width - 1);
  }
};

// Intersection over union of two boxes; 0 when either is empty.
double box_iou(const BoundingBox& a, const BoundingBox& b);

// Repeats a single-frame image `frames` times along the time axis.
FeatureMap replicate_image(const FeatureMap& img, int frames);

}  // namespace wf

#include "wf/tensor.hpp"

#include <algorithm>
#include <string>

namespace wf {
namespace {

void check_dims(int t, int c, int h, int w) {
  if (t < 1 || c < 1 || h < 1 || w < 1) {
    throw ContractError("tensor dims must be positive, got (" +
                        std::to_string(t) + ", " + std::to_string(c) + ", " +
                        std::to_string(h) + ", " + std::to_string(w) + ")");
  }
}

}  // namespace

FeatureMap::FeatureMap(int frames, int channels, int height, int width)
    : t_(frames), c_(channels), h_(height), w_(width) {
  check_dims(frames, channels, height, width);
  data_.assign(static_cast<std::size_t>(t_) * c_ * h_ * w_, 0.0f);
}

FeatureMap::FeatureMap(int frames, int channels, int height, int width,
                       std::vector<float> data)
    : t_(frames), c_(channels), h_(height), w_(width), data_(std::move(data)) {
  check_dims(frames, channels, height, width);
  const auto want = static_cast<std::size_t>(t_) * c_ * h_ * w_;
  if (data_.size() != want) {
    throw ContractError("tensor data has " + std::to_string(data_.size()) +
                        " values, dims require " + std::to_string(want));
  }
}

ValidityMask::ValidityMask(int frames, int height, int width, float fill)
    : t_(frames), h_(height), w_(width) {
  check_dims(frames, 1, height, width);
  if (fill < 0.0f || fill > 1.0f) {
    throw ContractError("validity fill outside [0, 1]");
  }
  data_.assign(static_cast<std::size_t>(t_) * h_ * w_, fill);
}

ValidityMask::ValidityMask(int frames, int height, int width,
                           std::vector<float> data)
    : t_(frames), h_(height), w_(width), data_(std::move(data)) {
  check_dims(frames, 1, height, width);
  const auto want = static_cast<std::size_t>(t_) * h_ * w_;
  if (data_.size() != want) {
    throw ContractError("validity data has " + std::to_string(data_.size()) +
                        " values, dims require " + std::to_string(want));
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ContractError("validity value outside [0, 1]");
    }
  }
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  if (!a.well_formed() || !b.well_formed()) return 0.0;
  const double iy0 = std::max(a.y0, b.y0);
  const double ix0 = std::max(a.x0, b.x0);
  const double iy1 = std::min(a.y1, b.y1);
  const double ix1 = std::min(a.x1, b.x1);
  if (iy1 <= iy0 || ix1 <= ix0) return 0.0;
  const double inter = (iy1 - iy0) * (ix1 - ix0);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

FeatureMap replicate_image(const FeatureMap& img, int frames) {
  if (img.frames() != 1) {
    throw ContractError("replicate_image wants a single-frame input, got " +
                        std::to_string(img.frames()) + " frames");
  }
  if (frames < 1) {
    throw ContractError("replicate_image frame count must be positive");
  }
  FeatureMap out(frames, img.channels(), img.height(), img.width());
  const auto src = img.frame(0);
  for (int t = 0; t < frames; ++t) {
    std::copy(src.begin(), src.end(), out.frame(t).begin());
  }
  return out;
}

}  // namespace wf

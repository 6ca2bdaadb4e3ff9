#pragma once

#include <cstdint>
#include <vector>

#include "wf/tensor.hpp"
#include "wf/transform.hpp"

namespace wf {

// Per-frame non-negative saliency, dims (T', H, W).
class SaliencyMap {
 public:
  SaliencyMap() = default;
  SaliencyMap(int frames, int height, int width);
  SaliencyMap(int frames, int height, int width, std::vector<float> data);

  int frames() const { return t_; }
  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return data_.size(); }

  float at(int t, int i, int j) const { return data_[index(t, i, j)]; }
  float& at(int t, int i, int j) { return data_[index(t, i, j)]; }

  const std::vector<float>& data() const { return data_; }

  std::size_t index(int t, int i, int j) const {
    return (static_cast<std::size_t>(t) * h_ + i) * w_ + j;
  }

 private:
  int t_ = 0, h_ = 0, w_ = 0;
  std::vector<float> data_;
};

// Ordered fixation boxes, one per output frame.
class GazePath {
 public:
  explicit GazePath(std::vector<BoundingBox> boxes);

  std::size_t size() const { return boxes_.size(); }
  const BoundingBox& operator[](std::size_t i) const { return boxes_[i]; }
  const std::vector<BoundingBox>& boxes() const { return boxes_; }

 private:
  std::vector<BoundingBox> boxes_;
};

// Seeded synthetic camera-motion recipe: waypoint centers drawn uniformly
// within +/- center_extent (normalized coords), view scales log-uniform in
// [scale_min, scale_max], linear interpolation between waypoints.
struct MotionSpec {
  int frames = 0;
  int waypoints = 3;
  double scale_min = 0.3;
  double scale_max = 3.0;
  double center_extent = 1.0;
  std::uint64_t seed = 0;
};

// s(t, i, j) = sum over channels of |clip(t+1) - clip(t)|. Needs T >= 2.
SaliencyMap temporal_diff_saliency(const FeatureMap& clip);

// Smallest cell-extent box covering at least `fraction` of the accumulated
// saliency mass. Each axis independently keeps the shortest pixel interval
// whose excluded marginal mass is at most (1 - fraction) / 2 (earliest such
// interval on ties); the box spans the kept cells, so a single-pixel
// support yields a well-formed 1 x 1 box. Zero total mass is degenerate.
BoundingBox variance_box(const SaliencyMap& s, double fraction = 0.8);

// Pull affine mapping the output frame onto the box: output corners
// (-1,-1) and (1,1) read the box's top-left and bottom-right corners.
FrameTransform fixation_transform(const BoundingBox& box, int height,
                                  int width);

// Per-frame fixation track from one box per frame. smoothing in [0, 1)
// applies an exponential moving average over box corners before fixating
// (0 = use the boxes as given).
TransformTrack pursuit_track(const std::vector<BoundingBox>& boxes,
                             int height, int width, double smoothing = 0.0);

// Greedy overlap chain: start at the largest box (ties: lowest index),
// then repeatedly append the unused box with maximal IoU to the current
// one (ties: larger area, then lowest index).
GazePath order_saccades(const std::vector<BoundingBox>& boxes);

// Fixation track visiting the path's boxes in order, one per frame.
TransformTrack saccade_track(const GazePath& path, int height, int width);

// Seeded camera-motion track: waypoints at frames floor(i*(T-1)/(W-1)),
// per-frame transforms interpolate (center, log-scale) linearly between
// adjacent waypoints and are emitted as pull affines. Draws come from
// mt19937_64(seed) mapped to [0,1) via (x >> 11) * 2^-53, in order:
// (cy, cx) per waypoint, then one log-scale per waypoint.
TransformTrack synth_motion_track(const MotionSpec& spec);

}  // namespace wf

#pragma once

#include <vector>

#include "wf/tensor.hpp"
#include "wf/transform.hpp"
#include "wf/world_feature.hpp"

namespace wf {

enum class InterpMode { nearest, bilinear };

// Per-output-pixel source coordinates in normalized coords.
struct SampleGrid {
  int height = 0;
  int width = 0;
  std::vector<Point2> points;  // row-major H*W

  const Point2& at(int i, int j) const {
    return points[static_cast<std::size_t>(i) * width + j];
  }
};

// grid[i][j] = apply_point(tf, normalized(i, j)).
SampleGrid build_grid(const FrameTransform& tf, int height, int width);

struct WarpedFrame {
  FeatureMap features;   // 1 x C x H x W
  ValidityMask validity;  // 1 x H x W
};

// Renders a single frame under a pull transform: out(p) = frame(tf(p)).
// Nearest rounds each pixel coordinate with ties toward the larger index;
// bilinear blends the four neighbors. Samples falling outside the source
// are feature 0 / validity 0; bilinear interpolates validity with the same
// weights it uses for features.
WarpedFrame warp_frame(const FeatureMap& frame, const ValidityMask& validity,
                       const FrameTransform& tf, InterpMode mode);

// Same warp, but frame t_src of a clip written into frame t_dst of a
// preallocated output of equal spatial size.
void warp_frame_into(const FeatureMap& clip, const ValidityMask& validity,
                     int t_src, const FrameTransform& tf, InterpMode mode,
                     FeatureMap& out, ValidityMask& out_validity, int t_dst);

// Warps every frame u by compose(track[u], invert(track[reference])) so the
// whole clip sits in the reference frame's coordinate system. The output
// track is all identities (the stabilization is now explicit in the pixels).
WorldFeature warp_clip_to_reference(const WorldFeature& wf, int reference,
                                    InterpMode mode);

}  // namespace wf

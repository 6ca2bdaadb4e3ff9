#pragma once

#include <vector>

#include "wf/tensor.hpp"
#include "wf/world_feature.hpp"

namespace wf {

// 3D convolution layer description. Weights are stored as a 4-D tensor of
// dims (out, in*kt, kh, kw): the temporal kernel index nests inside the
// input-channel axis, so weight channel ci*kt + dt holds filter slice
// (ci, dt). kt must be odd so the center frame of the temporal footprint
// is well defined.
struct ConvSpec {
  int in = 0, out = 0;
  int kt = 1, kh = 1, kw = 1;
  int st = 1, sh = 1, sw = 1;
  int pt = 0, ph = 0, pw = 0;
  FeatureMap weights;
  std::vector<float> bias;
};

struct PoolSpec {
  enum class Kind { max, avg };
  Kind kind = Kind::max;
  int kt = 1, kh = 1, kw = 1;
  int st = 1, sh = 1, sw = 1;
  int pt = 0, ph = 0, pw = 0;
};

// How receptive-field frames are aligned before reduction. Both produce
// bit-identical outputs; per_output warps each tap frame on demand, while
// batched_copies materializes ceil(kt/st) aligned copies of the whole clip
// and gathers taps from them.
enum class AlignStrategy { per_output, batched_copies };

// World-coordinate 3D convolution. For output frame t the input center is
// c(t) = t*st + kt/2 - pt; every tap frame u = t*st - pt + dt is warped
// into c(t)'s coordinates (nearest) before the standard convolution sum
// acc = bias + sum over (ci, dt, di, dj) in that order, accumulated in
// double. Output validity is the mean warped validity over real taps
// (frames inside [0,T) at in-bounds positions); padding taps contribute
// zero features and are excluded from the validity denominator. Output
// frames whose center falls outside [0,T) are zero features, zero
// validity, identity transform. The output track resamples the input
// track at the centers.
WorldFeature world_conv3d(const WorldFeature& wf, const ConvSpec& spec,
                          AlignStrategy strategy = AlignStrategy::per_output);

// Max reduction over taps whose warped validity exceeds 0.5; no valid
// contributor gives 0. Output validity is the max warped validity over
// real taps (observed if any contributor was).
WorldFeature world_maxpool3d(const WorldFeature& wf, const PoolSpec& spec,
                             AlignStrategy strategy =
                                 AlignStrategy::per_output);

// Mean over taps whose warped validity exceeds 0.5 (denominator = count of
// valid contributors; none gives 0 output). Output validity is the mean
// warped validity over real taps, as for convolution.
WorldFeature world_avgpool3d(const WorldFeature& wf, const PoolSpec& spec,
                             AlignStrategy strategy =
                                 AlignStrategy::per_output);

// Appends the validity mask as one extra feature channel; track unchanged.
WorldFeature attach_validity_channel(const WorldFeature& wf);

}  // namespace wf

#pragma once

// Reference implementations used only by tests: written independently of
// the library's engines, favoring the most literal possible loops.

#include "wf/sampler.hpp"
#include "wf/tensor.hpp"
#include "wf/transform.hpp"
#include "wf/worldops.hpp"

namespace oracle {

// Per-pixel warp: recomputes normalized coordinates and interpolation from
// scratch, driving the transform through its raw 3x3 matrix.
wf::WarpedFrame warp_frame(const wf::FeatureMap& frame,
                           const wf::ValidityMask& validity,
                           const wf::FrameTransform& tf, wf::InterpMode mode);

// Plain zero-padded 3-D convolution on raw frames, no transforms involved.
// Accumulates per output value in a double, channel-major over the kernel.
wf::FeatureMap plain_conv3d(const wf::FeatureMap& x, const wf::ConvSpec& s);

// Plain pooling that ignores padding: max over the in-range taps, or their
// mean with the count excluding padded positions. Empty windows yield zero.
wf::FeatureMap plain_pool3d(const wf::FeatureMap& x, const wf::PoolSpec& s,
                            bool is_max);

}  // namespace oracle

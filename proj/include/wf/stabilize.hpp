#pragma once

#include <tuple>
#include <vector>

#include "wf/tensor.hpp"
#include "wf/transform.hpp"

namespace wf {

// Settings for direct photometric alignment.
struct AlignConfig {
  double delta = 0.01;        // residual clip threshold
  TransformKind kind = TransformKind::affine;
  int max_iters = 200;        // per pyramid level
  double initial_step = 1e-2;
  double grow = 1.2;          // step multiplier on accepted moves
  double shrink = 0.5;        // step multiplier on rejected moves
  double tol = 1e-6;          // relative objective decrease to declare done
  int levels = 3;             // pyramid levels, factor-2 box downsample
};

// Result of aligning one frame pair. `transform` is a pull map: sampling
// the source through it renders the source in the target's coordinates.
struct PairAlignment {
  FrameTransform transform;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Scales both frames by 1/std(target) (population std over every value of
// the target) so the target has unit variance. Returns the scaled frames
// and the applied scale. Target variance <= 1e-12 throws
// DegenerateInputError.
std::tuple<FeatureMap, FeatureMap, double> normalize_pair(
    const FeatureMap& target, const FeatureMap& source);

// Mean over in-bounds pixels of min(sum_c residual^2, delta), where the
// residual compares target(p) with the source bilinearly sampled at tf(p).
// Pixels whose sample point leaves the source are excluded from numerator
// and denominator; no pixel in bounds throws DegenerateInputError.
double photometric_objective(const FeatureMap& target,
                             const FeatureMap& source,
                             const FrameTransform& tf, double delta);

// Exact gradient of photometric_objective with respect to the transform
// parameters (6 for affine; 8 for homography, the last entry stays pinned
// at 1). Clipped pixels (residual^2 >= delta) contribute zero.
std::vector<double> objective_gradient(const FeatureMap& target,
                                       const FeatureMap& source,
                                       const FrameTransform& tf,
                                       double delta);

// Coarse-to-fine gradient descent on the clipped photometric objective,
// initialized at identity, adaptive step (grow on accept, shrink on
// reject), never accepting a step that increases the objective.
// A degenerate (near-constant) target yields identity, converged=false.
PairAlignment align_pair(const FeatureMap& target, const FeatureMap& source,
                         const AlignConfig& cfg);

// Aligns consecutive frames and chains the pair transforms into a track
// with track[reference] exactly identity; warping each frame u by track[u]
// renders it in the reference frame's coordinates. Degenerate pairs fall
// back to identity (see the per-pair `converged` flags in `diagnostics`).
TransformTrack stabilize_clip(const FeatureMap& clip, int reference,
                              const AlignConfig& cfg,
                              std::vector<PairAlignment>* diagnostics =
                                  nullptr);

}  // namespace wf

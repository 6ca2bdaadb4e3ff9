#pragma once

#include <utility>

#include "wf/tensor.hpp"
#include "wf/transform.hpp"

namespace wf {

// A feature map bundled with the per-frame pull transforms that place its
// pixels in world coordinates, plus a per-pixel observedness mask.
struct WorldFeature {
  FeatureMap features;
  TransformTrack track;
  ValidityMask validity;

  WorldFeature(FeatureMap f, TransformTrack tr, ValidityMask v)
      : features(std::move(f)), track(std::move(tr)), validity(std::move(v)) {
    if (track.size() != features.frames() ||
        validity.frames() != features.frames() ||
        validity.height() != features.height() ||
        validity.width() != features.width()) {
      throw ContractError(
          "world feature parts disagree on frame count or frame size");
    }
  }

  // Plain clip: identity track, everything observed.
  static WorldFeature from_features(FeatureMap f) {
    const int t = f.frames(), h = f.height(), w = f.width();
    return WorldFeature(std::move(f), TransformTrack::identities(t),
                        ValidityMask::ones(t, h, w));
  }
};

}  // namespace wf

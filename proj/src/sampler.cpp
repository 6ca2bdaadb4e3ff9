#include "wf/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace wf {

SampleGrid build_grid(const FrameTransform& tf, int height, int width) {
  if (height < 1 || width < 1) {
    throw ContractError("grid dims must be positive");
  }
  SampleGrid grid;
  grid.height = height;
  grid.width = width;
  grid.points.resize(static_cast<std::size_t>(height) * width);
  for (int i = 0; i < height; ++i) {
    const double ny = norm_coord(i, height);
    for (int j = 0; j < width; ++j) {
      grid.points[static_cast<std::size_t>(i) * width + j] =
          apply_point(tf, {ny, norm_coord(j, width)});
    }
  }
  return grid;
}

void warp_frame_into(const FeatureMap& clip, const ValidityMask& validity,
                     int t_src, const FrameTransform& tf, InterpMode mode,
                     FeatureMap& out, ValidityMask& out_validity, int t_dst) {
  const int h = clip.height(), w = clip.width(), channels = clip.channels();
  if (validity.height() != h || validity.width() != w ||
      out.height() != h || out.width() != w || out.channels() != channels ||
      out_validity.height() != h || out_validity.width() != w) {
    throw ContractError("warp buffers disagree on dimensions");
  }
  if (t_src < 0 || t_src >= clip.frames() || t_dst < 0 ||
      t_dst >= out.frames()) {
    throw ContractError("warp frame index out of range");
  }
  const auto grid = build_grid(tf, h, w);

  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const Point2 p = grid.at(i, j);
      const double py = pixel_coord(p.y, h);
      const double px = pixel_coord(p.x, w);

      if (mode == InterpMode::nearest) {
        // Ties round toward the larger index.
        const int iy = static_cast<int>(std::floor(py + 0.5));
        const int ix = static_cast<int>(std::floor(px + 0.5));
        if (iy < 0 || iy >= h || ix < 0 || ix >= w) {
          for (int c = 0; c < channels; ++c) out.at(t_dst, c, i, j) = 0.0f;
          out_validity.at(t_dst, i, j) = 0.0f;
          continue;
        }
        for (int c = 0; c < channels; ++c) {
          out.at(t_dst, c, i, j) = clip.at(t_src, c, iy, ix);
        }
        out_validity.at(t_dst, i, j) = validity.at(t_src, iy, ix);
        continue;
      }

      // Bilinear: the sample point itself must land inside the frame.
      if (!(py >= 0.0 && py <= h - 1 && px >= 0.0 && px <= w - 1)) {
        for (int c = 0; c < channels; ++c) out.at(t_dst, c, i, j) = 0.0f;
        out_validity.at(t_dst, i, j) = 0.0f;
        continue;
      }
      int y0 = 0, x0 = 0;
      double wy = 0.0, wx = 0.0;
      if (h > 1) {
        y0 = std::min(static_cast<int>(std::floor(py)), h - 2);
        wy = py - y0;
      }
      if (w > 1) {
        x0 = std::min(static_cast<int>(std::floor(px)), w - 2);
        wx = px - x0;
      }
      const int y1 = std::min(y0 + 1, h - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const double w00 = (1.0 - wy) * (1.0 - wx);
      const double w01 = (1.0 - wy) * wx;
      const double w10 = wy * (1.0 - wx);
      const double w11 = wy * wx;
      for (int c = 0; c < channels; ++c) {
        out.at(t_dst, c, i, j) = static_cast<float>(
            w00 * clip.at(t_src, c, y0, x0) + w01 * clip.at(t_src, c, y0, x1) +
            w10 * clip.at(t_src, c, y1, x0) + w11 * clip.at(t_src, c, y1, x1));
      }
      out_validity.at(t_dst, i, j) = static_cast<float>(
          w00 * validity.at(t_src, y0, x0) + w01 * validity.at(t_src, y0, x1) +
          w10 * validity.at(t_src, y1, x0) + w11 * validity.at(t_src, y1, x1));
    }
  }
}

WarpedFrame warp_frame(const FeatureMap& frame, const ValidityMask& validity,
                       const FrameTransform& tf, InterpMode mode) {
  if (frame.frames() != 1 || validity.frames() != 1) {
    throw ContractError("warp_frame wants single-frame inputs");
  }
  WarpedFrame out{FeatureMap(1, frame.channels(), frame.height(),
                             frame.width()),
                  ValidityMask(1, frame.height(), frame.width(), 0.0f)};
  warp_frame_into(frame, validity, 0, tf, mode, out.features, out.validity, 0);
  return out;
}

WorldFeature warp_clip_to_reference(const WorldFeature& wf, int reference,
                                    InterpMode mode) {
  const int t_total = wf.features.frames();
  if (reference < 0 || reference >= t_total) {
    throw ContractError("reference frame outside clip");
  }
  FeatureMap out_feat(t_total, wf.features.channels(), wf.features.height(),
                      wf.features.width());
  ValidityMask out_val(t_total, wf.features.height(), wf.features.width(),
                       0.0f);
  const FrameTransform inv_ref = invert(wf.track[reference]);
  for (int u = 0; u < t_total; ++u) {
    if (u == reference) {
      // Mathematically an identity warp; copy to keep the frame bit-exact.
      std::copy(wf.features.frame(u).begin(), wf.features.frame(u).end(),
                out_feat.frame(u).begin());
      std::copy(wf.validity.frame(u).begin(), wf.validity.frame(u).end(),
                out_val.frame(u).begin());
      continue;
    }
    warp_frame_into(wf.features, wf.validity, u,
                    compose(wf.track[u], inv_ref), mode, out_feat, out_val, u);
  }
  return WorldFeature(std::move(out_feat),
                      TransformTrack::identities(t_total), std::move(out_val));
}

}  // namespace wf

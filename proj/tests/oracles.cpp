#include "oracles.hpp"

#include <array>
#include <cmath>

namespace oracle {

wf::WarpedFrame warp_frame(const wf::FeatureMap& frame,
                           const wf::ValidityMask& validity,
                           const wf::FrameTransform& tf, wf::InterpMode mode) {
  const int h = frame.height(), w = frame.width(), channels = frame.channels();
  wf::WarpedFrame out{wf::FeatureMap(1, channels, h, w),
                      wf::ValidityMask(1, h, w, 0.0f)};
  const std::array<double, 9>& m = tf.matrix();
  const bool projective = tf.kind() == wf::TransformKind::homography;

  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const double ny = h > 1 ? 2.0 * i / (h - 1) - 1.0 : 0.0;
      const double nx = w > 1 ? 2.0 * j / (w - 1) - 1.0 : 0.0;
      double sy = m[0] * ny + m[1] * nx + m[2];
      double sx = m[3] * ny + m[4] * nx + m[5];
      if (projective) {
        const double sw = m[6] * ny + m[7] * nx + m[8];
        sy /= sw;
        sx /= sw;
      }
      const double py = (sy + 1.0) * (h - 1) / 2.0;
      const double px = (sx + 1.0) * (w - 1) / 2.0;

      if (mode == wf::InterpMode::nearest) {
        const double ry = std::floor(py + 0.5);
        const double rx = std::floor(px + 0.5);
        if (ry < 0 || ry > h - 1 || rx < 0 || rx > w - 1) continue;
        const int iy = static_cast<int>(ry), ix = static_cast<int>(rx);
        for (int c = 0; c < channels; ++c) {
          out.features.at(0, c, i, j) = frame.at(0, c, iy, ix);
        }
        out.validity.at(0, i, j) = validity.at(0, iy, ix);
      } else {
        if (py < 0 || py > h - 1 || px < 0 || px > w - 1) continue;
        int y0 = static_cast<int>(std::floor(py));
        int x0 = static_cast<int>(std::floor(px));
        if (y0 > h - 2) y0 = h > 1 ? h - 2 : 0;
        if (x0 > w - 2) x0 = w > 1 ? w - 2 : 0;
        const double wy = h > 1 ? py - y0 : 0.0;
        const double wx = w > 1 ? px - x0 : 0.0;
        const int y1 = std::min(y0 + 1, h - 1);
        const int x1 = std::min(x0 + 1, w - 1);
        auto blend = [&](auto value) {
          return (1 - wy) * (1 - wx) * value(y0, x0) +
                 (1 - wy) * wx * value(y0, x1) +
                 wy * (1 - wx) * value(y1, x0) + wy * wx * value(y1, x1);
        };
        for (int c = 0; c < channels; ++c) {
          out.features.at(0, c, i, j) = static_cast<float>(blend(
              [&](int a, int b) { return double(frame.at(0, c, a, b)); }));
        }
        out.validity.at(0, i, j) = static_cast<float>(blend(
            [&](int a, int b) { return double(validity.at(0, a, b)); }));
      }
    }
  }
  return out;
}

wf::FeatureMap plain_conv3d(const wf::FeatureMap& x, const wf::ConvSpec& s) {
  const int to = (x.frames() + 2 * s.pt - s.kt) / s.st + 1;
  const int ho = (x.height() + 2 * s.ph - s.kh) / s.sh + 1;
  const int wo = (x.width() + 2 * s.pw - s.kw) / s.sw + 1;
  wf::FeatureMap out(to, s.out, ho, wo);
  for (int t = 0; t < to; ++t)
    for (int oc = 0; oc < s.out; ++oc)
      for (int i = 0; i < ho; ++i)
        for (int j = 0; j < wo; ++j) {
          double acc = s.bias[oc];
          for (int ci = 0; ci < s.in; ++ci)
            for (int dt = 0; dt < s.kt; ++dt) {
              const int u = t * s.st - s.pt + dt;
              if (u < 0 || u >= x.frames()) continue;
              for (int di = 0; di < s.kh; ++di) {
                const int a = i * s.sh - s.ph + di;
                if (a < 0 || a >= x.height()) continue;
                for (int dj = 0; dj < s.kw; ++dj) {
                  const int b = j * s.sw - s.pw + dj;
                  if (b < 0 || b >= x.width()) continue;
                  acc += double(s.weights.at(oc, ci * s.kt + dt, di, dj)) *
                         x.at(u, ci, a, b);
                }
              }
            }
          out.at(t, oc, i, j) = float(acc);
        }
  return out;
}

wf::FeatureMap plain_pool3d(const wf::FeatureMap& x, const wf::PoolSpec& s,
                            bool is_max) {
  const int to = (x.frames() + 2 * s.pt - s.kt) / s.st + 1;
  const int ho = (x.height() + 2 * s.ph - s.kh) / s.sh + 1;
  const int wo = (x.width() + 2 * s.pw - s.kw) / s.sw + 1;
  wf::FeatureMap out(to, x.channels(), ho, wo);
  for (int t = 0; t < to; ++t)
    for (int c = 0; c < x.channels(); ++c)
      for (int i = 0; i < ho; ++i)
        for (int j = 0; j < wo; ++j) {
          float best = 0.0f;
          double acc = 0.0;
          int count = 0;
          for (int dt = 0; dt < s.kt; ++dt) {
            const int u = t * s.st - s.pt + dt;
            if (u < 0 || u >= x.frames()) continue;
            for (int di = 0; di < s.kh; ++di) {
              const int a = i * s.sh - s.ph + di;
              if (a < 0 || a >= x.height()) continue;
              for (int dj = 0; dj < s.kw; ++dj) {
                const int b = j * s.sw - s.pw + dj;
                if (b < 0 || b >= x.width()) continue;
                const float v = x.at(u, c, a, b);
                if (count == 0 || v > best) best = v;
                acc += v;
                ++count;
              }
            }
          }
          out.at(t, c, i, j) =
              count == 0 ? 0.0f : (is_max ? best : float(acc / count));
        }
  return out;
}

}  // namespace oracle

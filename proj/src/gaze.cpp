#include "wf/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "wf/errors.hpp"

namespace wf {

namespace {

void check_dims(int frames, int height, int width) {
  if (frames <= 0 || height <= 0 || width <= 0) {
    throw ContractError("saliency dims must be positive");
  }
}

// Normalized coordinate of a continuous pixel position.
double norm_pos(double p, int n) {
  return n > 1 ? 2.0 * p / (n - 1) - 1.0 : 0.0;
}

// Shortest index interval [lo, hi] whose excluded prefix+suffix mass stays
// within budget; earliest such interval on ties. The comparison is kept in
// the form prefix + suffix <= budget (no rearrangement) so results agree
// exactly with a direct evaluation of the rule. Masses are nonnegative, so
// the smallest valid hi is monotone in lo and a two-pointer scan suffices.
std::pair<int, int> min_interval(const std::vector<double>& mass,
                                 double budget) {
  const int n = static_cast<int>(mass.size());
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + mass[i];
  const double total = prefix[n];

  int best_lo = 0, best_hi = n - 1;
  int best_len = n;
  int hi = 0;
  for (int lo = 0; lo < n; ++lo) {
    if (prefix[lo] > budget) break;  // excluded prefix alone too heavy
    if (hi < lo) hi = lo;
    while (prefix[lo] + (total - prefix[hi + 1]) > budget) ++hi;
    if (hi - lo + 1 < best_len) {
      best_len = hi - lo + 1;
      best_lo = lo;
      best_hi = hi;
    }
  }
  return {best_lo, best_hi};
}

}  // namespace

SaliencyMap::SaliencyMap(int frames, int height, int width)
    : t_(frames), h_(height), w_(width) {
  check_dims(frames, height, width);
  data_.assign(static_cast<std::size_t>(t_) * h_ * w_, 0.0f);
}

SaliencyMap::SaliencyMap(int frames, int height, int width,
                         std::vector<float> data)
    : t_(frames), h_(height), w_(width), data_(std::move(data)) {
  check_dims(frames, height, width);
  if (data_.size() != static_cast<std::size_t>(t_) * h_ * w_) {
    throw ContractError("saliency data size does not match dims");
  }
  for (float v : data_) {
    if (!(v >= 0.0f)) throw ContractError("saliency values must be >= 0");
  }
}

GazePath::GazePath(std::vector<BoundingBox> boxes)
    : boxes_(std::move(boxes)) {
  if (boxes_.empty()) throw ContractError("gaze path must be nonempty");
}

SaliencyMap temporal_diff_saliency(const FeatureMap& clip) {
  if (clip.frames() < 2) {
    throw ContractError("temporal difference needs at least 2 frames");
  }
  SaliencyMap s(clip.frames() - 1, clip.height(), clip.width());
  for (int t = 0; t + 1 < clip.frames(); ++t) {
    for (int c = 0; c < clip.channels(); ++c) {
      for (int i = 0; i < clip.height(); ++i) {
        for (int j = 0; j < clip.width(); ++j) {
          s.at(t, i, j) +=
              std::abs(clip.at(t + 1, c, i, j) - clip.at(t, c, i, j));
        }
      }
    }
  }
  return s;
}

BoundingBox variance_box(const SaliencyMap& s, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ContractError("fraction must be in (0, 1]");
  }
  const int h = s.height(), w = s.width();
  std::vector<double> row_mass(h, 0.0), col_mass(w, 0.0);
  for (int t = 0; t < s.frames(); ++t) {
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const double v = s.at(t, i, j);
        row_mass[i] += v;
        col_mass[j] += v;
      }
    }
  }
  double total = 0.0;
  for (double v : row_mass) total += v;
  if (total <= 0.0) throw DegenerateInputError("saliency mass is zero");

  const double budget = (1.0 - fraction) / 2.0 * total;
  const auto [r0, r1] = min_interval(row_mass, budget);
  const auto [c0, c1] = min_interval(col_mass, budget);
  return BoundingBox{r0 - 0.5, c0 - 0.5, r1 + 0.5, c1 + 0.5, std::nullopt};
}

FrameTransform fixation_transform(const BoundingBox& box, int height,
                                  int width) {
  if (height < 1 || width < 1) {
    throw ContractError("frame dims must be positive");
  }
  if (!box.well_formed()) throw ContractError("degenerate box");
  if (!box.intersects_frame(height, width)) {
    throw ContractError("box does not intersect the frame");
  }
  const double ny0 = norm_pos(box.y0, height), ny1 = norm_pos(box.y1, height);
  const double nx0 = norm_pos(box.x0, width), nx1 = norm_pos(box.x1, width);
  return FrameTransform::affine({(ny1 - ny0) / 2.0, 0.0, (ny1 + ny0) / 2.0,
                                 0.0, (nx1 - nx0) / 2.0, (nx1 + nx0) / 2.0});
}

TransformTrack pursuit_track(const std::vector<BoundingBox>& boxes,
                             int height, int width, double smoothing) {
  if (boxes.empty()) throw ContractError("need one box per frame");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw ContractError("smoothing must be in [0, 1)");
  }

  std::vector<FrameTransform> track;
  track.reserve(boxes.size());
  BoundingBox ema = boxes[0];
  for (std::size_t t = 0; t < boxes.size(); ++t) {
    if (smoothing > 0.0 && t > 0) {
      const double a = smoothing, b = 1.0 - smoothing;
      ema = BoundingBox{a * ema.y0 + b * boxes[t].y0,
                        a * ema.x0 + b * boxes[t].x0,
                        a * ema.y1 + b * boxes[t].y1,
                        a * ema.x1 + b * boxes[t].x1, boxes[t].t};
    } else {
      ema = boxes[t];
    }
    try {
      track.push_back(fixation_transform(ema, height, width));
    } catch (const ContractError& e) {
      throw ContractError(std::string(e.what()) + " at frame " +
                          std::to_string(t));
    }
  }
  return TransformTrack(std::move(track));
}

GazePath order_saccades(const std::vector<BoundingBox>& boxes) {
  if (boxes.size() < 2) throw ContractError("need at least 2 boxes");
  const int n = static_cast<int>(boxes.size());

  int current = 0;
  for (int i = 1; i < n; ++i) {
    if (boxes[i].area() > boxes[current].area()) current = i;
  }

  std::vector<bool> used(n, false);
  used[current] = true;
  std::vector<BoundingBox> ordered{boxes[current]};
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_iou = -1.0;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double iou = box_iou(boxes[current], boxes[i]);
      const bool better =
          iou > best_iou ||
          (iou == best_iou && boxes[i].area() > boxes[best].area());
      if (best < 0 || better) {
        best = i;
        best_iou = iou;
      }
    }
    used[best] = true;
    current = best;
    ordered.push_back(boxes[best]);
  }
  return GazePath(std::move(ordered));
}

TransformTrack saccade_track(const GazePath& path, int height, int width) {
  std::vector<FrameTransform> track;
  track.reserve(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) {
    track.push_back(fixation_transform(path[t], height, width));
  }
  return TransformTrack(std::move(track));
}

TransformTrack synth_motion_track(const MotionSpec& spec) {
  if (spec.waypoints < 2) throw ContractError("need at least 2 waypoints");
  if (spec.frames < spec.waypoints) {
    throw ContractError("need at least as many frames as waypoints");
  }
  if (!(spec.scale_min > 0.0 && spec.scale_min <= spec.scale_max)) {
    throw ContractError("scale range must satisfy 0 < min <= max");
  }
  if (!(spec.center_extent >= 0.0)) {
    throw ContractError("center extent must be >= 0");
  }

  // Raw engine draws mapped to [0, 1) by hand so tracks are reproducible
  // across standard library implementations.
  std::mt19937_64 eng(spec.seed);
  auto u01 = [&eng] { return (eng() >> 11) * 0x1.0p-53; };

  const int nw = spec.waypoints;
  std::vector<double> cy(nw), cx(nw), ls(nw);
  for (int i = 0; i < nw; ++i) {
    cy[i] = (2.0 * u01() - 1.0) * spec.center_extent;
    cx[i] = (2.0 * u01() - 1.0) * spec.center_extent;
  }
  const double lmin = std::log(spec.scale_min);
  const double lmax = std::log(spec.scale_max);
  for (int i = 0; i < nw; ++i) {
    ls[i] = lmin + u01() * (lmax - lmin);
  }

  std::vector<int> wp_frame(nw);
  for (int i = 0; i < nw; ++i) {
    wp_frame[i] = static_cast<int>(
        static_cast<long long>(i) * (spec.frames - 1) / (nw - 1));
  }

  std::vector<FrameTransform> track;
  track.reserve(spec.frames);
  int seg = 0;
  for (int t = 0; t < spec.frames; ++t) {
    while (seg + 2 < nw && t > wp_frame[seg + 1]) ++seg;
    const int fa = wp_frame[seg], fb = wp_frame[seg + 1];
    const double u = fb > fa ? static_cast<double>(t - fa) / (fb - fa) : 0.0;
    const double y = (1.0 - u) * cy[seg] + u * cy[seg + 1];
    const double x = (1.0 - u) * cx[seg] + u * cx[seg + 1];
    const double s = std::exp((1.0 - u) * ls[seg] + u * ls[seg + 1]);
    track.push_back(FrameTransform::affine({s, 0.0, y, 0.0, s, x}));
  }
  return TransformTrack(std::move(track));
}

}  // namespace wf

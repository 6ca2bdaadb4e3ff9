#include "wf/worldops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wf/errors.hpp"
#include "wf/sampler.hpp"
#include "wf/transform.hpp"

namespace wf {

namespace {

struct OpGeom {
  int kt, kh, kw, st, sh, sw, pt, ph, pw;
};

void check_geom(const OpGeom& g) {
  if (g.kt < 1 || g.kh < 1 || g.kw < 1) {
    throw ContractError("kernel dims must be >= 1");
  }
  if (g.kt % 2 == 0) {
    throw ContractError("temporal kernel must be odd");
  }
  if (g.st < 1 || g.sh < 1 || g.sw < 1) {
    throw ContractError("strides must be >= 1");
  }
  if (g.pt < 0 || g.ph < 0 || g.pw < 0) {
    throw ContractError("padding must be >= 0");
  }
}

int out_len(int n, int k, int s, int p) {
  if (n + 2 * p < k) {
    throw ContractError("kernel exceeds the padded input extent");
  }
  return (n + 2 * p - k) / s + 1;
}

// Receptive-field frames of one output frame, warped into the coordinates
// of its input center frame. Slot dt holds input frame t*st - pt + dt;
// slots whose frame falls outside [0, T) stay zero with real == false.
struct TapStack {
  FeatureMap f;
  ValidityMask v;
  std::vector<bool> real;
};

// Aligned whole-clip copies for the batched strategy: ceil(kt/st) copies
// suffice because the outputs reading any given input frame have distinct
// indices modulo that count. In copy m, frame u sits in the coordinates of
// the center of the unique output t = m (mod copies) whose receptive field
// contains u.
struct BatchedCopies {
  std::vector<FeatureMap> f;
  std::vector<ValidityMask> v;
  int count = 0;
};

BatchedCopies build_copies(const WorldFeature& wf, const OpGeom& g,
                           int t_out) {
  const int t_in = wf.features.frames();
  BatchedCopies copies;
  copies.count = (g.kt + g.st - 1) / g.st;
  for (int m = 0; m < copies.count; ++m) {
    copies.f.emplace_back(t_in, wf.features.channels(), wf.features.height(),
                          wf.features.width());
    copies.v.emplace_back(t_in, wf.features.height(), wf.features.width(),
                          0.0f);
  }
  for (int t = 0; t < t_out; ++t) {
    const int c = t * g.st + g.kt / 2 - g.pt;
    if (c < 0 || c >= t_in) continue;
    const int m = t % copies.count;
    for (int dt = 0; dt < g.kt; ++dt) {
      const int u = t * g.st - g.pt + dt;
      if (u < 0 || u >= t_in) continue;
      const auto rel = relative_to_center(wf.track, u, c);
      warp_frame_into(wf.features, wf.validity, u, rel, InterpMode::nearest,
                      copies.f[m], copies.v[m], u);
    }
  }
  return copies;
}

// Builds the tap stack for output frame t with center c (both in range).
TapStack gather_taps(const WorldFeature& wf, const OpGeom& g, int t, int c,
                     const BatchedCopies* copies) {
  const int t_in = wf.features.frames();
  const int ch = wf.features.channels();
  const int h = wf.features.height(), w = wf.features.width();
  TapStack stack{FeatureMap(g.kt, ch, h, w), ValidityMask(g.kt, h, w, 0.0f),
                 std::vector<bool>(g.kt, false)};
  for (int dt = 0; dt < g.kt; ++dt) {
    const int u = t * g.st - g.pt + dt;
    if (u < 0 || u >= t_in) continue;
    stack.real[dt] = true;
    if (copies) {
      const auto& src_f = copies->f[t % copies->count];
      const auto& src_v = copies->v[t % copies->count];
      std::copy(src_f.frame(u).begin(), src_f.frame(u).end(),
                stack.f.frame(dt).begin());
      std::copy(src_v.frame(u).begin(), src_v.frame(u).end(),
                stack.v.frame(dt).begin());
    } else {
      const auto rel = relative_to_center(wf.track, u, c);
      warp_frame_into(wf.features, wf.validity, u, rel, InterpMode::nearest,
                      stack.f, stack.v, dt);
    }
  }
  return stack;
}

// Mean warped validity over real in-bounds taps; padding taps are excluded
// from the denominator so a fully observed input stays fully observed.
void fill_mean_validity(const TapStack& stack, const OpGeom& g, int h, int w,
                        int t, int h_out, int w_out, ValidityMask& out) {
  for (int i = 0; i < h_out; ++i) {
    for (int j = 0; j < w_out; ++j) {
      double acc = 0.0;
      int count = 0;
      for (int dt = 0; dt < g.kt; ++dt) {
        if (!stack.real[dt]) continue;
        for (int di = 0; di < g.kh; ++di) {
          const int a = i * g.sh - g.ph + di;
          if (a < 0 || a >= h) continue;
          for (int dj = 0; dj < g.kw; ++dj) {
            const int b = j * g.sw - g.pw + dj;
            if (b < 0 || b >= w) continue;
            acc += stack.v.at(dt, a, b);
            ++count;
          }
        }
      }
      out.at(t, i, j) =
          count > 0 ? static_cast<float>(acc / count) : 0.0f;
    }
  }
}

struct OutputShape {
  int t, h, w;
};

OutputShape output_shape(const WorldFeature& wf, const OpGeom& g) {
  return {out_len(wf.features.frames(), g.kt, g.st, g.pt),
          out_len(wf.features.height(), g.kh, g.sh, g.ph),
          out_len(wf.features.width(), g.kw, g.sw, g.pw)};
}

WorldFeature assemble(FeatureMap features, std::vector<FrameTransform> track,
                      ValidityMask validity) {
  return WorldFeature(std::move(features), TransformTrack(std::move(track)),
                      std::move(validity));
}

}  // namespace

WorldFeature world_conv3d(const WorldFeature& wf, const ConvSpec& spec,
                          AlignStrategy strategy) {
  const OpGeom g{spec.kt, spec.kh, spec.kw, spec.st, spec.sh,
                 spec.sw, spec.pt, spec.ph, spec.pw};
  check_geom(g);
  if (spec.in != wf.features.channels()) {
    throw ContractError("input channel count does not match the spec");
  }
  if (spec.out < 1) throw ContractError("need at least one output channel");
  if (spec.weights.frames() != spec.out ||
      spec.weights.channels() != spec.in * spec.kt ||
      spec.weights.height() != spec.kh || spec.weights.width() != spec.kw) {
    throw ContractError("weight dims must be (out, in*kt, kh, kw)");
  }
  if (static_cast<int>(spec.bias.size()) != spec.out) {
    throw ContractError("bias length must equal the output channel count");
  }

  const auto shape = output_shape(wf, g);
  const int t_in = wf.features.frames();
  const int h = wf.features.height(), w = wf.features.width();

  FeatureMap out(shape.t, spec.out, shape.h, shape.w);
  ValidityMask out_v(shape.t, shape.h, shape.w, 0.0f);
  std::vector<FrameTransform> out_track(shape.t, FrameTransform::identity());

  BatchedCopies copies;
  if (strategy == AlignStrategy::batched_copies) {
    copies = build_copies(wf, g, shape.t);
  }

  for (int t = 0; t < shape.t; ++t) {
    const int c = t * g.st + g.kt / 2 - g.pt;
    if (c < 0 || c >= t_in) continue;  // zero frame, identity transform
    out_track[t] = wf.track[c];
    const auto stack = gather_taps(
        wf, g, t, c,
        strategy == AlignStrategy::batched_copies ? &copies : nullptr);

    for (int oc = 0; oc < spec.out; ++oc) {
      for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) {
          double acc = spec.bias[oc];
          for (int ci = 0; ci < spec.in; ++ci) {
            for (int dt = 0; dt < g.kt; ++dt) {
              if (!stack.real[dt]) continue;
              for (int di = 0; di < g.kh; ++di) {
                const int a = i * g.sh - g.ph + di;
                if (a < 0 || a >= h) continue;
                for (int dj = 0; dj < g.kw; ++dj) {
                  const int b = j * g.sw - g.pw + dj;
                  if (b < 0 || b >= w) continue;
                  acc += static_cast<double>(
                             spec.weights.at(oc, ci * g.kt + dt, di, dj)) *
                         stack.f.at(dt, ci, a, b);
                }
              }
            }
          }
          out.at(t, oc, i, j) = static_cast<float>(acc);
        }
      }
    }
    fill_mean_validity(stack, g, h, w, t, shape.h, shape.w, out_v);
  }
  return assemble(std::move(out), std::move(out_track), std::move(out_v));
}

namespace {

WorldFeature world_pool3d(const WorldFeature& wf, const PoolSpec& spec,
                          AlignStrategy strategy) {
  const OpGeom g{spec.kt, spec.kh, spec.kw, spec.st, spec.sh,
                 spec.sw, spec.pt, spec.ph, spec.pw};
  check_geom(g);

  const auto shape = output_shape(wf, g);
  const int t_in = wf.features.frames();
  const int ch = wf.features.channels();
  const int h = wf.features.height(), w = wf.features.width();
  const bool is_max = spec.kind == PoolSpec::Kind::max;

  FeatureMap out(shape.t, ch, shape.h, shape.w);
  ValidityMask out_v(shape.t, shape.h, shape.w, 0.0f);
  std::vector<FrameTransform> out_track(shape.t, FrameTransform::identity());

  BatchedCopies copies;
  if (strategy == AlignStrategy::batched_copies) {
    copies = build_copies(wf, g, shape.t);
  }

  for (int t = 0; t < shape.t; ++t) {
    const int c = t * g.st + g.kt / 2 - g.pt;
    if (c < 0 || c >= t_in) continue;
    out_track[t] = wf.track[c];
    const auto stack = gather_taps(
        wf, g, t, c,
        strategy == AlignStrategy::batched_copies ? &copies : nullptr);

    for (int cc = 0; cc < ch; ++cc) {
      for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) {
          float best = 0.0f;
          double acc = 0.0;
          int count = 0;
          for (int dt = 0; dt < g.kt; ++dt) {
            if (!stack.real[dt]) continue;
            for (int di = 0; di < g.kh; ++di) {
              const int a = i * g.sh - g.ph + di;
              if (a < 0 || a >= h) continue;
              for (int dj = 0; dj < g.kw; ++dj) {
                const int b = j * g.sw - g.pw + dj;
                if (b < 0 || b >= w) continue;
                if (stack.v.at(dt, a, b) <= 0.5f) continue;
                const float x = stack.f.at(dt, cc, a, b);
                if (count == 0 || x > best) best = x;
                acc += x;
                ++count;
              }
            }
          }
          out.at(t, cc, i, j) =
              count == 0 ? 0.0f
                         : (is_max ? best : static_cast<float>(acc / count));
        }
      }
    }

    if (is_max) {
      for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) {
          float best = 0.0f;
          for (int dt = 0; dt < g.kt; ++dt) {
            if (!stack.real[dt]) continue;
            for (int di = 0; di < g.kh; ++di) {
              const int a = i * g.sh - g.ph + di;
              if (a < 0 || a >= h) continue;
              for (int dj = 0; dj < g.kw; ++dj) {
                const int b = j * g.sw - g.pw + dj;
                if (b < 0 || b >= w) continue;
                best = std::max(best, stack.v.at(dt, a, b));
              }
            }
          }
          out_v.at(t, i, j) = best;
        }
      }
    } else {
      fill_mean_validity(stack, g, h, w, t, shape.h, shape.w, out_v);
    }
  }
  return assemble(std::move(out), std::move(out_track), std::move(out_v));
}

}  // namespace

WorldFeature world_maxpool3d(const WorldFeature& wf, const PoolSpec& spec,
                             AlignStrategy strategy) {
  PoolSpec s = spec;
  s.kind = PoolSpec::Kind::max;
  return world_pool3d(wf, s, strategy);
}

WorldFeature world_avgpool3d(const WorldFeature& wf, const PoolSpec& spec,
                             AlignStrategy strategy) {
  PoolSpec s = spec;
  s.kind = PoolSpec::Kind::avg;
  return world_pool3d(wf, s, strategy);
}

WorldFeature attach_validity_channel(const WorldFeature& wf) {
  const int t = wf.features.frames(), ch = wf.features.channels();
  const int h = wf.features.height(), w = wf.features.width();
  FeatureMap out(t, ch + 1, h, w);
  for (int u = 0; u < t; ++u) {
    for (int c = 0; c < ch; ++c) {
      std::copy(wf.features.plane(u, c).begin(),
                wf.features.plane(u, c).end(), out.plane(u, c).begin());
    }
    std::copy(wf.validity.frame(u).begin(), wf.validity.frame(u).end(),
              out.plane(u, ch).begin());
  }
  return WorldFeature(std::move(out), wf.track, wf.validity);
}

}  // namespace wf

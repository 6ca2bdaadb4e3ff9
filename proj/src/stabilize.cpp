#include "wf/stabilize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wf {
namespace {

void check_frame_pair(const FeatureMap& target, const FeatureMap& source) {
  if (target.frames() != 1 || source.frames() != 1) {
    throw ContractError("alignment frames must be single-frame tensors");
  }
  if (!target.same_dims(source)) {
    throw ContractError("alignment frames disagree on dimensions");
  }
}

int param_count(TransformKind kind) {
  return kind == TransformKind::affine ? 6 : 8;
}

FrameTransform params_to_transform(TransformKind kind,
                                   const std::vector<double>& p) {
  if (kind == TransformKind::affine) {
    return FrameTransform::affine({p[0], p[1], p[2], p[3], p[4], p[5]});
  }
  return FrameTransform::homography(
      {p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], 1.0});
}

std::vector<double> identity_params(TransformKind kind) {
  if (kind == TransformKind::affine) return {1, 0, 0, 0, 1, 0};
  return {1, 0, 0, 0, 1, 0, 0, 0};
}

// Shared core: objective value, optionally its parameter gradient.
double objective_impl(const FeatureMap& target, const FeatureMap& source,
                      const FrameTransform& tf, double delta,
                      std::vector<double>* grad) {
  check_frame_pair(target, source);
  if (delta <= 0.0) {
    throw ContractError("delta must be positive");
  }
  const int h = target.height(), w = target.width();
  const int channels = target.channels();
  const auto& m = tf.matrix();
  const bool projective = tf.kind() == TransformKind::homography;
  const double py_per_ny = (h - 1) / 2.0;
  const double px_per_nx = (w - 1) / 2.0;

  if (grad) grad->assign(param_count(tf.kind()), 0.0);
  double sum = 0.0;
  long count = 0;

  for (int i = 0; i < h; ++i) {
    const double ny = norm_coord(i, h);
    for (int j = 0; j < w; ++j) {
      const double nx = norm_coord(j, w);
      const double qy_num = m[0] * ny + m[1] * nx + m[2];
      const double qx_num = m[3] * ny + m[4] * nx + m[5];
      double qy = qy_num, qx = qx_num, wd = 1.0;
      if (projective) {
        wd = m[6] * ny + m[7] * nx + m[8];
        if (std::abs(wd) <= 1e-12) continue;  // maps to infinity: off-frame
        qy = qy_num / wd;
        qx = qx_num / wd;
      }
      const double py = pixel_coord(qy, h);
      const double px = pixel_coord(qx, w);
      if (!(py >= 0.0 && py <= h - 1 && px >= 0.0 && px <= w - 1)) continue;

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

      double r2 = 0.0;
      double gqy = 0.0, gqx = 0.0;  // d(residual^2)/d(qy, qx)
      for (int c = 0; c < channels; ++c) {
        const double f00 = source.at(0, c, y0, x0);
        const double f01 = source.at(0, c, y0, x1);
        const double f10 = source.at(0, c, y1, x0);
        const double f11 = source.at(0, c, y1, x1);
        const double s = (1 - wy) * ((1 - wx) * f00 + wx * f01) +
                         wy * ((1 - wx) * f10 + wx * f11);
        const double r = target.at(0, c, i, j) - s;
        r2 += r * r;
        if (grad) {
          const double ds_dpy = (1 - wx) * (f10 - f00) + wx * (f11 - f01);
          const double ds_dpx = (1 - wy) * (f01 - f00) + wy * (f11 - f10);
          gqy += -2.0 * r * ds_dpy * py_per_ny;
          gqx += -2.0 * r * ds_dpx * px_per_nx;
        }
      }
      ++count;
      if (r2 >= delta) {
        sum += delta;
        continue;  // clipped: flat region, zero gradient
      }
      sum += r2;
      if (!grad) continue;
      auto& g = *grad;
      if (!projective) {
        g[0] += gqy * ny;
        g[1] += gqy * nx;
        g[2] += gqy;
        g[3] += gqx * ny;
        g[4] += gqx * nx;
        g[5] += gqx;
      } else {
        g[0] += gqy * ny / wd;
        g[1] += gqy * nx / wd;
        g[2] += gqy / wd;
        g[3] += gqx * ny / wd;
        g[4] += gqx * nx / wd;
        g[5] += gqx / wd;
        g[6] += -(gqy * qy + gqx * qx) * ny / wd;
        g[7] += -(gqy * qy + gqx * qx) * nx / wd;
      }
    }
  }

  if (count == 0) {
    throw DegenerateInputError("no in-bounds pixels under this transform");
  }
  if (grad) {
    for (auto& v : *grad) v /= count;
  }
  return sum / count;
}

// 2x2 box-filter downsample; odd trailing rows/columns are dropped.
FeatureMap box_down(const FeatureMap& f) {
  const int h2 = f.height() / 2, w2 = f.width() / 2;
  FeatureMap out(1, f.channels(), h2, w2);
  for (int c = 0; c < f.channels(); ++c) {
    for (int i = 0; i < h2; ++i) {
      for (int j = 0; j < w2; ++j) {
        const double s = double(f.at(0, c, 2 * i, 2 * j)) +
                         f.at(0, c, 2 * i, 2 * j + 1) +
                         f.at(0, c, 2 * i + 1, 2 * j) +
                         f.at(0, c, 2 * i + 1, 2 * j + 1);
        out.at(0, c, i, j) = static_cast<float>(s / 4.0);
      }
    }
  }
  return out;
}

void check_config(const AlignConfig& cfg) {
  if (cfg.delta <= 0.0 || cfg.levels < 1 || cfg.max_iters < 0 ||
      cfg.initial_step <= 0.0 || !(cfg.grow > 1.0) ||
      !(cfg.shrink > 0.0 && cfg.shrink < 1.0) || cfg.tol < 0.0) {
    throw ContractError("bad alignment config");
  }
}

}  // namespace

std::tuple<FeatureMap, FeatureMap, double> normalize_pair(
    const FeatureMap& target, const FeatureMap& source) {
  check_frame_pair(target, source);
  double mean = 0.0;
  for (float v : target.data()) mean += v;
  mean /= static_cast<double>(target.size());
  double var = 0.0;
  for (float v : target.data()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(target.size());
  if (var <= 1e-12) {
    throw DegenerateInputError("target frame is (near-)constant");
  }
  const double scale = 1.0 / std::sqrt(var);
  FeatureMap t2 = target, s2 = source;
  for (auto& v : t2.data()) v = static_cast<float>(v * scale);
  for (auto& v : s2.data()) v = static_cast<float>(v * scale);
  return {std::move(t2), std::move(s2), scale};
}

double photometric_objective(const FeatureMap& target,
                             const FeatureMap& source,
                             const FrameTransform& tf, double delta) {
  return objective_impl(target, source, tf, delta, nullptr);
}

std::vector<double> objective_gradient(const FeatureMap& target,
                                       const FeatureMap& source,
                                       const FrameTransform& tf,
                                       double delta) {
  std::vector<double> grad;
  objective_impl(target, source, tf, delta, &grad);
  return grad;
}

PairAlignment align_pair(const FeatureMap& target, const FeatureMap& source,
                         const AlignConfig& cfg) {
  check_config(cfg);
  check_frame_pair(target, source);

  FeatureMap t_norm(1, 1, 1, 1), s_norm(1, 1, 1, 1);
  try {
    auto [t2, s2, scale] = normalize_pair(target, source);
    t_norm = std::move(t2);
    s_norm = std::move(s2);
  } catch (const DegenerateInputError&) {
    return {FrameTransform::identity(), 0.0, 0, false};
  }

  // Pyramid, full resolution first; stop above 8 pixels on the short side.
  std::vector<std::pair<FeatureMap, FeatureMap>> pyramid;
  pyramid.emplace_back(std::move(t_norm), std::move(s_norm));
  while (static_cast<int>(pyramid.size()) < cfg.levels &&
         std::min(pyramid.back().first.height(),
                  pyramid.back().first.width()) >= 16) {
    pyramid.emplace_back(box_down(pyramid.back().first),
                         box_down(pyramid.back().second));
  }

  std::vector<double> theta = identity_params(cfg.kind);
  int iterations = 0;
  bool converged = false;
  double best_obj = 0.0;

  for (int level = static_cast<int>(pyramid.size()) - 1; level >= 0;
       --level) {
    const FeatureMap& lt = pyramid[level].first;
    const FeatureMap& ls = pyramid[level].second;
    bool level_converged = false;

    double obj;
    try {
      obj = objective_impl(lt, ls, params_to_transform(cfg.kind, theta),
                           cfg.delta, nullptr);
    } catch (const DegenerateInputError&) {
      continue;  // everything off-frame at this scale; try the next level
    }

    double step = cfg.initial_step;
    for (int it = 0; it < cfg.max_iters; ++it) {
      std::vector<double> grad;
      objective_impl(lt, ls, params_to_transform(cfg.kind, theta), cfg.delta,
                     &grad);
      double gnorm = 0.0;
      for (double v : grad) gnorm += v * v;
      if (gnorm == 0.0) {  // fully clipped or exact minimum: stationary
        level_converged = true;
        break;
      }

      std::vector<double> cand = theta;
      for (std::size_t k = 0; k < cand.size(); ++k) {
        cand[k] -= step * grad[k];
      }
      double cand_obj = std::numeric_limits<double>::infinity();
      try {
        cand_obj = objective_impl(lt, ls, params_to_transform(cfg.kind, cand),
                                  cfg.delta, nullptr);
      } catch (const Error&) {
        // singular / off-frame candidate: treat as a rejected step
      }
      ++iterations;

      if (cand_obj < obj) {
        const double rel = (obj - cand_obj) / std::max(obj, 1e-300);
        theta = std::move(cand);
        obj = cand_obj;
        step *= cfg.grow;
        if (rel < cfg.tol) {
          level_converged = true;
          break;
        }
      } else {
        step *= cfg.shrink;
        if (step < 1e-14) {  // no descent step at any scale: stationary
          level_converged = true;
          break;
        }
      }
    }

    best_obj = obj;
    if (level == 0) converged = level_converged;
  }

  return {params_to_transform(cfg.kind, theta), best_obj, iterations,
          converged};
}

TransformTrack stabilize_clip(const FeatureMap& clip, int reference,
                              const AlignConfig& cfg,
                              std::vector<PairAlignment>* diagnostics) {
  check_config(cfg);
  const int t_total = clip.frames();
  if (reference < 0 || reference >= t_total) {
    throw ContractError("reference frame outside clip");
  }

  auto slice = [&](int t) {
    FeatureMap f(1, clip.channels(), clip.height(), clip.width());
    std::copy(clip.frame(t).begin(), clip.frame(t).end(),
              f.frame(0).begin());
    return f;
  };

  std::vector<PairAlignment> pairs;
  pairs.reserve(t_total > 0 ? t_total - 1 : 0);
  for (int t = 0; t + 1 < t_total; ++t) {
    pairs.push_back(align_pair(slice(t), slice(t + 1), cfg));
  }

  std::vector<FrameTransform> track(t_total, FrameTransform::identity());
  for (int u = reference + 1; u < t_total; ++u) {
    track[u] = compose(pairs[u - 1].transform, track[u - 1]);
  }
  for (int u = reference - 1; u >= 0; --u) {
    track[u] = compose(invert(pairs[u].transform), track[u + 1]);
  }

  if (diagnostics) *diagnostics = std::move(pairs);
  return TransformTrack(std::move(track));
}

}  // namespace wf

#include "wf/transform.hpp"

#include <cmath>
#include <string>

namespace wf {
namespace {

constexpr double kDetFloor = 1e-12;

std::array<double, 9> mat_mul(const std::array<double, 9>& a,
                              const std::array<double, 9>& b) {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        acc += a[r * 3 + k] * b[k * 3 + c];
      }
      out[r * 3 + c] = acc;
    }
  }
  return out;
}

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

}  // namespace

FrameTransform FrameTransform::identity() {
  return affine({1, 0, 0, 0, 1, 0});
}

FrameTransform FrameTransform::affine(const std::array<double, 6>& p) {
  return FrameTransform(TransformKind::affine,
                        {p[0], p[1], p[2], p[3], p[4], p[5], 0, 0, 1});
}

FrameTransform FrameTransform::homography(const std::array<double, 9>& p) {
  if (std::abs(p[8]) <= kDetFloor) {
    throw NumericDomainError(
        "homography cannot be normalized: |h22| = " + std::to_string(p[8]));
  }
  std::array<double, 9> m;
  for (int i = 0; i < 9; ++i) m[i] = p[i] / p[8];
  m[8] = 1.0;
  return FrameTransform(TransformKind::homography, m);
}

FrameTransform FrameTransform::translate(double dy, double dx) {
  return affine({1, 0, dy, 0, 1, dx});
}

FrameTransform FrameTransform::scale(double sy, double sx) {
  return affine({sy, 0, 0, 0, sx, 0});
}

FrameTransform FrameTransform::as_homography() const {
  if (kind_ == TransformKind::homography) return *this;
  return homography(m_);
}

Point2 apply_point(const FrameTransform& tf, Point2 p) {
  const auto& m = tf.matrix();
  const double y = m[0] * p.y + m[1] * p.x + m[2];
  const double x = m[3] * p.y + m[4] * p.x + m[5];
  if (tf.kind() == TransformKind::affine) {
    return {y, x};
  }
  const double w = m[6] * p.y + m[7] * p.x + m[8];
  if (std::abs(w) <= kDetFloor) {
    throw NumericDomainError("homography maps point to infinity");
  }
  return {y / w, x / w};
}

FrameTransform compose(const FrameTransform& a, const FrameTransform& b) {
  const auto m = mat_mul(a.matrix(), b.matrix());
  if (a.kind() == TransformKind::affine &&
      b.kind() == TransformKind::affine) {
    return FrameTransform::affine({m[0], m[1], m[2], m[3], m[4], m[5]});
  }
  return FrameTransform::homography(m);
}

FrameTransform invert(const FrameTransform& tf) {
  const auto& m = tf.matrix();
  if (tf.kind() == TransformKind::affine) {
    const double det = m[0] * m[4] - m[1] * m[3];
    if (std::abs(det) <= kDetFloor) {
      throw SingularityError("affine transform is singular (det = " +
                             std::to_string(det) + ")");
    }
    const double i0 = m[4] / det, i1 = -m[1] / det;
    const double i3 = -m[3] / det, i4 = m[0] / det;
    return FrameTransform::affine(
        {i0, i1, -(i0 * m[2] + i1 * m[5]), i3, i4, -(i3 * m[2] + i4 * m[5])});
  }
  const double det = det3(m);
  if (std::abs(det) <= kDetFloor) {
    throw SingularityError("homography is singular (det = " +
                           std::to_string(det) + ")");
  }
  // Adjugate over determinant.
  std::array<double, 9> inv{
      (m[4] * m[8] - m[5] * m[7]) / det, (m[2] * m[7] - m[1] * m[8]) / det,
      (m[1] * m[5] - m[2] * m[4]) / det, (m[5] * m[6] - m[3] * m[8]) / det,
      (m[0] * m[8] - m[2] * m[6]) / det, (m[2] * m[3] - m[0] * m[5]) / det,
      (m[3] * m[7] - m[4] * m[6]) / det, (m[1] * m[6] - m[0] * m[7]) / det,
      (m[0] * m[4] - m[1] * m[3]) / det};
  return FrameTransform::homography(inv);
}

TransformTrack::TransformTrack(std::vector<FrameTransform> transforms)
    : transforms_(std::move(transforms)) {
  if (transforms_.empty()) {
    throw ContractError("transform track must be nonempty");
  }
  bool mixed = false;
  for (const auto& tf : transforms_) {
    if (tf.kind() != transforms_.front().kind()) mixed = true;
  }
  if (mixed) {
    for (auto& tf : transforms_) tf = tf.as_homography();
  }
}

TransformTrack TransformTrack::identities(int frames) {
  if (frames < 1) {
    throw ContractError("track length must be positive");
  }
  return TransformTrack(
      std::vector<FrameTransform>(frames, FrameTransform::identity()));
}

FrameTransform relative_to_center(const TransformTrack& track, int u, int c) {
  if (u < 0 || u >= track.size() || c < 0 || c >= track.size()) {
    throw ContractError("frame index outside track");
  }
  return compose(track[u], invert(track[c]));
}

TransformTrack resample_track(const TransformTrack& track, int stride,
                              int offset) {
  const int t_in = track.size();
  if (stride < 1) {
    throw ContractError("stride must be >= 1");
  }
  if (offset < 0 || offset >= t_in) {
    throw ContractError("offset " + std::to_string(offset) +
                        " outside track of length " + std::to_string(t_in));
  }
  const int t_out = (t_in - offset + stride - 1) / stride;
  std::vector<FrameTransform> out;
  out.reserve(t_out);
  for (int t = 0; t < t_out; ++t) {
    out.push_back(track[offset + t * stride]);
  }
  return TransformTrack(std::move(out));
}

}  // namespace wf

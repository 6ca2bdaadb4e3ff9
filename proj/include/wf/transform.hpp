#pragma once

#include <array>
#include <span>
#include <vector>

#include "wf/errors.hpp"

namespace wf {

// Normalized corner-aligned coordinates: (y, x) in [-1, 1]^2 where (-1, -1)
// is the center of the top-left pixel and (1, 1) the center of the
// bottom-right pixel. Pixel (i, j) of an H x W frame sits at
// (-1 + 2i/(H-1), -1 + 2j/(W-1)); a length-1 axis maps to coordinate 0.
struct Point2 {
  double y = 0.0;
  double x = 0.0;
};

inline double norm_coord(int i, int n) {
  return n > 1 ? -1.0 + 2.0 * i / (n - 1) : 0.0;
}
inline double pixel_coord(double norm, int n) {
  return (norm + 1.0) * (n - 1) / 2.0;
}

enum class TransformKind { affine, homography };

// One spatial transform in normalized coordinates, PULL semantics:
// output(p) = source(apply_point(tf, p)). Affine params (a0..a5) mean
// (y, x) -> (a0*y + a1*x + a2, a3*y + a4*x + a5); a homography is a
// row-major 3x3 homogeneous matrix acting on (y, x, 1), stored with the
// last entry normalized to 1.
class FrameTransform {
 public:
  FrameTransform() : FrameTransform(identity()) {}

  static FrameTransform identity();
  static FrameTransform affine(const std::array<double, 6>& params);
  // Normalizes so params[8] == 1; |params[8]| <= 1e-12 before
  // normalization throws NumericDomainError.
  static FrameTransform homography(const std::array<double, 9>& params);
  static FrameTransform translate(double dy, double dx);
  static FrameTransform scale(double sy, double sx);

  TransformKind kind() const { return kind_; }
  // 6 values for affine, 9 for homography.
  std::span<const double> params() const {
    return {m_.data(), kind_ == TransformKind::affine ? std::size_t{6}
                                                      : std::size_t{9}};
  }
  // Full 3x3 homogeneous matrix, row-major; affine has bottom row (0,0,1).
  const std::array<double, 9>& matrix() const { return m_; }

  FrameTransform as_homography() const;

 private:
  FrameTransform(TransformKind kind, const std::array<double, 9>& m)
      : kind_(kind), m_(m) {}

  TransformKind kind_ = TransformKind::affine;
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

// Throws NumericDomainError when a homography maps p to infinity
// (denominator magnitude <= 1e-12).
Point2 apply_point(const FrameTransform& tf, Point2 p);

// apply_point(compose(a, b), p) == apply_point(a, apply_point(b, p)):
// b runs first. Affine iff both inputs are affine.
FrameTransform compose(const FrameTransform& a, const FrameTransform& b);

// Throws SingularityError when |det| <= 1e-12 (affine: 2x2 linear part;
// homography: full 3x3 matrix).
FrameTransform invert(const FrameTransform& tf);

// Per-frame transforms for a clip; nonempty, homogeneous kind (mixed
// input is promoted to homography).
class TransformTrack {
 public:
  explicit TransformTrack(std::vector<FrameTransform> transforms);
  static TransformTrack identities(int frames);

  int size() const { return static_cast<int>(transforms_.size()); }
  const FrameTransform& operator[](int t) const { return transforms_[t]; }
  TransformKind kind() const { return transforms_.front().kind(); }

  auto begin() const { return transforms_.begin(); }
  auto end() const { return transforms_.end(); }

 private:
  std::vector<FrameTransform> transforms_;
};

// compose(track[u], invert(track[c])): warping frame u by the result
// renders it in frame c's coordinate system.
FrameTransform relative_to_center(const TransformTrack& track, int u, int c);

// output[t] = track[offset + t*stride]; length ceil((T - offset)/stride).
// Requires stride >= 1 and 0 <= offset < track length.
TransformTrack resample_track(const TransformTrack& track, int stride,
                              int offset);

}  // namespace wf

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "wf/sampler.hpp"
#include "wf/transform.hpp"
#include "wf/world_feature.hpp"

namespace {

using wf::FrameTransform;

wf::FeatureMap random_frame(std::mt19937& rng, int c, int h, int w) {
  std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
  wf::FeatureMap fm(1, c, h, w);
  for (auto& v : fm.data()) v = dist(rng);
  return fm;
}

wf::ValidityMask random_validity(std::mt19937& rng, int h, int w) {
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> vals(static_cast<std::size_t>(h) * w);
  for (auto& v : vals) v = dist(rng);
  return wf::ValidityMask(1, h, w, std::move(vals));
}

// Pull transform that shifts content by (dy, dx) pixels on an h x w frame.
FrameTransform pixel_shift(int dy, int dx, int h, int w) {
  const double ny = h > 1 ? -2.0 * dy / (h - 1) : 0.0;
  const double nx = w > 1 ? -2.0 * dx / (w - 1) : 0.0;
  return FrameTransform::translate(ny, nx);
}

bool frames_equal(const wf::FeatureMap& a, const wf::FeatureMap& b) {
  return a.same_dims(b) &&
         std::memcmp(a.data().data(), b.data().data(),
                     a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("build_grid matches the coordinate convention") {
  const auto grid = wf::build_grid(FrameTransform::identity(), 3, 3);
  CHECK(grid.at(0, 0).y == -1.0);
  CHECK(grid.at(0, 0).x == -1.0);
  CHECK(grid.at(1, 1).y == 0.0);
  CHECK(grid.at(2, 2).x == 1.0);
  CHECK(grid.at(0, 2).y == -1.0);
  CHECK(grid.at(0, 2).x == 1.0);

  // One-pixel x shift on a width-9 frame: offset 2/(W-1) = 0.25.
  const auto shifted =
      wf::build_grid(FrameTransform::translate(0.0, 0.25), 3, 9);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 9; ++j) {
      CHECK(shifted.at(i, j).x ==
            doctest::Approx(wf::norm_coord(j, 9) + 0.25));
    }
  }

  const auto scaled = wf::build_grid(FrameTransform::scale(0.5, 0.5), 5, 5);
  CHECK(scaled.at(0, 0).y == doctest::Approx(-0.5));
  CHECK(scaled.at(4, 4).x == doctest::Approx(0.5));
}

TEST_CASE("identity nearest warp is a bit-exact copy") {
  std::mt19937 rng(31);
  const auto frame = random_frame(rng, 3, 7, 9);
  const auto validity = random_validity(rng, 7, 9);
  const auto out = wf::warp_frame(frame, validity, FrameTransform::identity(),
                                  wf::InterpMode::nearest);
  CHECK(frames_equal(out.features, frame));
  CHECK(std::memcmp(out.validity.data().data(), validity.data().data(),
                    validity.size() * sizeof(float)) == 0);

  // Idempotence: warping the warped result changes nothing.
  const auto again = wf::warp_frame(out.features, out.validity,
                                    FrameTransform::identity(),
                                    wf::InterpMode::nearest);
  CHECK(frames_equal(again.features, frame));
}

TEST_CASE("integer translation shifts content and invalidates the gap") {
  std::mt19937 rng(32);
  const auto frame = random_frame(rng, 2, 8, 8);
  const auto validity = wf::ValidityMask::ones(1, 8, 8);
  const auto tf = pixel_shift(0, 3, 8, 8);
  const auto out =
      wf::warp_frame(frame, validity, tf, wf::InterpMode::nearest);

  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (j < 3) {
        CHECK(out.validity.at(0, i, j) == 0.0f);
        CHECK(out.features.at(0, 0, i, j) == 0.0f);
      } else {
        CHECK(out.validity.at(0, i, j) == 1.0f);
        CHECK(out.features.at(0, 0, i, j) == frame.at(0, 0, i, j - 3));
        CHECK(out.features.at(0, 1, i, j) == frame.at(0, 1, i, j - 3));
      }
    }
  }
}

TEST_CASE("nearest ties round toward the larger index") {
  // Exact half-pixel pull shift: sample for output j lands at j - 0.5.
  wf::FeatureMap frame(1, 1, 1, 5);
  for (int j = 0; j < 5; ++j) frame.at(0, 0, 0, j) = static_cast<float>(j);
  const auto tf = FrameTransform::translate(0.0, -0.5 * 2.0 / 4.0);
  const auto out = wf::warp_frame(frame, wf::ValidityMask::ones(1, 1, 5), tf,
                                  wf::InterpMode::nearest);
  // j - 0.5 rounds up to j.
  for (int j = 1; j < 5; ++j) {
    CHECK(out.features.at(0, 0, 0, j) == static_cast<float>(j));
  }
  CHECK(out.features.at(0, 0, 0, 0) == 0.0f);  // -0.5 rounds to 0: in bounds
  CHECK(out.validity.at(0, 0, 0) == 1.0f);
}

TEST_CASE("bilinear half-pixel shift interpolates linearly") {
  wf::FeatureMap ramp(1, 1, 4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) {
      ramp.at(0, 0, i, j) = static_cast<float>(2 * j + i);
    }
  }
  // Half-pixel pull shift: output j samples the source at j + 0.5.
  const auto half = FrameTransform::translate(0.0, 0.5 * 2.0 / 5.0);
  const auto out = wf::warp_frame(ramp, wf::ValidityMask::ones(1, 4, 6), half,
                                  wf::InterpMode::bilinear);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double want = 2.0 * (j + 0.5) + i;
      CHECK(out.features.at(0, 0, i, j) ==
            doctest::Approx(want).epsilon(1e-6));
    }
  }
}

TEST_CASE("warp matches the brute-force oracle") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> small(-0.25, 0.25);
  std::uniform_real_distribution<double> persp(-0.05, 0.05);
  std::uniform_int_distribution<int> dim(1, 24);

  for (int trial = 0; trial < 50; ++trial) {
    const int h = dim(rng), w = dim(rng);
    const auto frame = random_frame(rng, 2, h, w);
    const auto validity = random_validity(rng, h, w);
    FrameTransform tf = FrameTransform::identity();
    switch (trial % 3) {
      case 0:
        tf = FrameTransform::affine({1.0 + small(rng), small(rng), small(rng),
                                     small(rng), 1.0 + small(rng),
                                     small(rng)});
        break;
      case 1:
        tf = FrameTransform::homography(
            {1.0 + small(rng), small(rng), small(rng), small(rng),
             1.0 + small(rng), small(rng), persp(rng), persp(rng), 1.0});
        break;
      case 2:
        tf = pixel_shift(trial % 7 - 3, trial % 5 - 2, h, w);
        break;
    }

    const auto got_n =
        wf::warp_frame(frame, validity, tf, wf::InterpMode::nearest);
    const auto want_n = oracle::warp_frame(frame, validity, tf,
                                           wf::InterpMode::nearest);
    CHECK(frames_equal(got_n.features, want_n.features));
    CHECK(std::memcmp(got_n.validity.data().data(),
                      want_n.validity.data().data(),
                      want_n.validity.size() * sizeof(float)) == 0);

    const auto got_b =
        wf::warp_frame(frame, validity, tf, wf::InterpMode::bilinear);
    const auto want_b = oracle::warp_frame(frame, validity, tf,
                                           wf::InterpMode::bilinear);
    for (std::size_t k = 0; k < got_b.features.size(); ++k) {
      CHECK(std::abs(got_b.features.data()[k] - want_b.features.data()[k]) <
            1e-6);
    }
    for (std::size_t k = 0; k < got_b.validity.size(); ++k) {
      CHECK(std::abs(got_b.validity.data()[k] - want_b.validity.data()[k]) <
            1e-6);
    }
  }
}

TEST_CASE("out-of-bounds fraction matches the closed form") {
  std::mt19937 rng(34);
  const int h = 11, w = 17;
  const auto frame = random_frame(rng, 1, h, w);
  const auto validity = wf::ValidityMask::ones(1, h, w);
  for (int dy = -4; dy <= 4; dy += 2) {
    for (int dx = -3; dx <= 3; ++dx) {
      const auto out = wf::warp_frame(frame, validity,
                                      pixel_shift(dy, dx, h, w),
                                      wf::InterpMode::nearest);
      int zeros = 0;
      for (float v : out.validity.data()) {
        if (v == 0.0f) ++zeros;
      }
      // fraction = 1 - (H-|dy|)(W-|dx|)/(HW), exact as a count
      CHECK(zeros == h * w - (h - std::abs(dy)) * (w - std::abs(dx)));
    }
  }
}

TEST_CASE("validity never exceeds the source maximum") {
  std::mt19937 rng(35);
  std::uniform_real_distribution<double> small(-0.3, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto frame = random_frame(rng, 1, 9, 9);
    auto validity = random_validity(rng, 9, 9);
    float vmax = 0.0f;
    for (float v : validity.data()) vmax = std::max(vmax, v);
    const auto tf =
        FrameTransform::affine({1.0 + small(rng), small(rng), small(rng),
                                small(rng), 1.0 + small(rng), small(rng)});
    for (auto mode : {wf::InterpMode::nearest, wf::InterpMode::bilinear}) {
      const auto out = wf::warp_frame(frame, validity, tf, mode);
      for (float v : out.validity.data()) {
        CHECK(v <= vmax + 1e-6f);
      }
    }
  }
}

TEST_CASE("same-direction integer translations compose exactly") {
  std::mt19937 rng(36);
  const int h = 10, w = 12;
  for (int trial = 0; trial < 10; ++trial) {
    const auto frame = random_frame(rng, 2, h, w);
    const auto validity = wf::ValidityMask::ones(1, h, w);
    std::uniform_int_distribution<int> d(0, 3);
    const int ay = d(rng), ax = d(rng), by = d(rng), bx = d(rng);
    const auto a = pixel_shift(ay, ax, h, w);
    const auto b = pixel_shift(by, bx, h, w);

    const auto step1 = wf::warp_frame(frame, validity, a,
                                      wf::InterpMode::nearest);
    const auto step2 = wf::warp_frame(step1.features, step1.validity, b,
                                      wf::InterpMode::nearest);
    const auto direct = wf::warp_frame(frame, validity, wf::compose(b, a),
                                       wf::InterpMode::nearest);
    CHECK(frames_equal(step2.features, direct.features));
    CHECK(std::memcmp(step2.validity.data().data(),
                      direct.validity.data().data(),
                      direct.validity.size() * sizeof(float)) == 0);
  }
}

TEST_CASE("bilinear composition is close for smooth images") {
  // Bilinear interpolation reproduces per-axis-linear images exactly, so a
  // near-bilinear image isolates the float rounding of double resampling.
  wf::FeatureMap frame(1, 1, 32, 32);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      frame.at(0, 0, i, j) = static_cast<float>(
          0.01 * i + 0.02 * j + 0.0003 * i * j +
          1e-5 * std::sin(i * 0.3) * std::cos(j * 0.4));
    }
  }
  const auto validity = wf::ValidityMask::ones(1, 32, 32);
  const auto a = FrameTransform::translate(0.011, -0.007);
  const auto b = FrameTransform::translate(-0.005, 0.013);

  const auto s1 = wf::warp_frame(frame, validity, a, wf::InterpMode::bilinear);
  const auto s2 = wf::warp_frame(s1.features, s1.validity, b,
                                 wf::InterpMode::bilinear);
  const auto direct = wf::warp_frame(frame, validity, wf::compose(b, a),
                                     wf::InterpMode::bilinear);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      if (s2.validity.at(0, i, j) > 0.999f &&
          direct.validity.at(0, i, j) > 0.999f) {
        CHECK(std::abs(s2.features.at(0, 0, i, j) -
                       direct.features.at(0, 0, i, j)) < 2e-6);
      }
    }
  }
}

TEST_CASE("warp_clip_to_reference stabilizes a translating scene") {
  std::mt19937 rng(37);
  const int h = 16, w = 16, t_total = 5, ref = 2;

  // Build the clip by shifting one base image an integer amount per frame;
  // the track records exactly those shifts as pull maps into frame 0.
  const auto base = random_frame(rng, 1, h, w);
  const auto ones = wf::ValidityMask::ones(1, h, w);
  wf::FeatureMap clip(t_total, 1, h, w);
  wf::ValidityMask clip_val(t_total, h, w, 0.0f);
  std::vector<FrameTransform> tfs;
  for (int t = 0; t < t_total; ++t) {
    const auto shift = pixel_shift(0, t, h, w);  // content moves right 1px/f
    const auto warped = wf::warp_frame(base, ones, shift,
                                       wf::InterpMode::nearest);
    std::copy(warped.features.frame(0).begin(),
              warped.features.frame(0).end(), clip.frame(t).begin());
    std::copy(warped.validity.frame(0).begin(),
              warped.validity.frame(0).end(), clip_val.frame(t).begin());
    // Pull map from frame-t pixels back to base coordinates.
    tfs.push_back(wf::invert(shift));
  }
  wf::WorldFeature world(std::move(clip), wf::TransformTrack(std::move(tfs)),
                         std::move(clip_val));

  const auto stab =
      wf::warp_clip_to_reference(world, ref, wf::InterpMode::nearest);
  CHECK(stab.track.size() == t_total);
  CHECK(stab.track[0].params()[0] == 1.0);  // identity track out
  CHECK(stab.track[0].params()[2] == 0.0);

  // Reference frame passes through bit-exact.
  CHECK(std::memcmp(stab.features.frame(ref).data(),
                    world.features.frame(ref).data(),
                    world.features.frame_size() * sizeof(float)) == 0);

  // Static scene: wherever every frame is valid, pixels agree across time.
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      bool all_valid = true;
      for (int t = 0; t < t_total; ++t) {
        all_valid = all_valid && stab.validity.at(t, i, j) == 1.0f;
      }
      if (!all_valid) continue;
      for (int t = 1; t < t_total; ++t) {
        CHECK(stab.features.at(t, 0, i, j) == stab.features.at(0, 0, i, j));
      }
    }
  }

  // Identity track: clip passes through unchanged.
  const auto plain = wf::WorldFeature::from_features(base);
  const auto same =
      wf::warp_clip_to_reference(plain, 0, wf::InterpMode::nearest);
  CHECK(frames_equal(same.features, base));
}

#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "wf/errors.hpp"
#include "wf/image_io.hpp"
#include "wf/tensor.hpp"
#include "wf/tensor_io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "wf_tensor_tests";
  fs::create_directories(dir);
  return dir;
}

void write_raw(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("feature map layout and accessors") {
  wf::FeatureMap fm(2, 3, 4, 5);
  CHECK(fm.size() == 120);
  fm.at(1, 2, 3, 4) = 7.0f;
  CHECK(fm.data()[119] == 7.0f);  // last element in row-major (T,C,H,W)
  CHECK(fm.index(0, 1, 0, 0) == 20);
  CHECK(fm.frame(1).size() == 60);
  CHECK(fm.plane(1, 2).size() == 20);

  CHECK_THROWS_AS(wf::FeatureMap(0, 1, 1, 1), wf::ContractError);
  CHECK_THROWS_AS(wf::FeatureMap(1, 1, 2, 2, std::vector<float>(3)),
                  wf::ContractError);
}

TEST_CASE("validity mask bounds") {
  auto ones = wf::ValidityMask::ones(2, 3, 3);
  CHECK(ones.at(1, 2, 2) == 1.0f);
  CHECK_THROWS_AS(wf::ValidityMask(1, 2, 2, std::vector<float>{0, 0.5f, 1, 2}),
                  wf::ContractError);
  CHECK_THROWS_AS(wf::ValidityMask(1, 1, 1, 1.5f), wf::ContractError);
}

TEST_CASE("tensor file round-trip is bit-exact") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> dist(-10.0f, 10.0f);
  wf::FeatureMap fm(2, 3, 4, 5);
  for (auto& v : fm.data()) v = dist(rng);
  fm.at(0, 0, 0, 0) = -0.0f;
  fm.at(0, 0, 0, 1) = 1e-38f;

  const auto path = temp_dir() / "roundtrip.wft";
  wf::write_tensor(fm, path);
  const wf::FeatureMap back = wf::read_tensor(path);

  REQUIRE(back.same_dims(fm));
  CHECK(std::memcmp(back.data().data(), fm.data().data(),
                    fm.size() * sizeof(float)) == 0);
}

TEST_CASE("tensor file size matches the format arithmetic") {
  const auto path = temp_dir() / "tiny.wft";
  wf::write_tensor(wf::FeatureMap(1, 1, 1, 1), path);
  CHECK(fs::file_size(path) == 24);  // 4 magic + 16 header + 4 payload
}

TEST_CASE("bad magic is a format error") {
  const auto path = temp_dir() / "badmagic.wft";
  std::string bytes = "XXXX";
  bytes.append(20, '\0');
  write_raw(path, bytes);
  CHECK_THROWS_AS(wf::read_tensor(path), wf::FormatError);
}

TEST_CASE("payload length mismatch is a truncation error") {
  // Header says 2x3x4x5 = 120 floats; give it 100.
  wf::FeatureMap fm(2, 3, 4, 5);
  const auto good = temp_dir() / "good.wft";
  wf::write_tensor(fm, good);

  std::ifstream in(good, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto short_path = temp_dir() / "short.wft";
  write_raw(short_path, bytes.substr(0, 20 + 100 * 4));
  CHECK_THROWS_AS(wf::read_tensor(short_path), wf::TruncationError);

  const auto long_path = temp_dir() / "long.wft";
  write_raw(long_path, bytes + std::string(4, '\0'));
  CHECK_THROWS_AS(wf::read_tensor(long_path), wf::TruncationError);
}

TEST_CASE("write failure surfaces as an IO error") {
  CHECK_THROWS_AS(
      wf::write_tensor(wf::FeatureMap(1, 1, 1, 1), "/no/such/dir/x.wft"),
      wf::IoError);
}

TEST_CASE("replicate_image") {
  wf::FeatureMap img(1, 3, 2, 2);
  img.at(0, 0, 0, 0) = 7.0f;
  img.at(0, 2, 1, 1) = -3.0f;

  const auto clip = wf::replicate_image(img, 3);
  REQUIRE(clip.frames() == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(clip.at(t, 0, 0, 0) == 7.0f);
    CHECK(clip.at(t, 2, 1, 1) == -3.0f);
  }

  const auto one = wf::replicate_image(img, 1);
  CHECK(std::memcmp(one.data().data(), img.data().data(),
                    img.size() * sizeof(float)) == 0);

  CHECK_THROWS_AS(wf::replicate_image(clip, 2), wf::ContractError);
}

TEST_CASE("pgm/ppm round-trip and ordering") {
  const auto dir = temp_dir() / "seq";
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    fs::remove(entry.path());
  }

  // Gray ramp image; written values are exact multiples of 1/255.
  wf::FeatureMap img(1, 1, 3, 4);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      img.at(0, 0, i, j) = static_cast<float>(i * 4 + j) / 255.0f;
    }
  }
  wf::write_image(img, dir / "frame_01.pgm");
  const auto back = wf::read_image(dir / "frame_01.pgm");
  REQUIRE(back.same_dims(img));
  for (std::size_t k = 0; k < img.size(); ++k) {
    CHECK(back.data()[k] == doctest::Approx(img.data()[k]).epsilon(1e-6));
  }

  wf::FeatureMap img2 = img;
  img2.at(0, 0, 0, 0) = 1.0f;
  wf::write_image(img2, dir / "frame_00.pgm");

  const auto clip = wf::read_image_dir(dir);
  REQUIRE(clip.frames() == 2);
  CHECK(clip.at(0, 0, 0, 0) == 1.0f);  // frame_00 sorts first
  CHECK(clip.at(1, 0, 0, 0) == 0.0f);

  // Color image exercises the P6 path and plane deinterleave.
  wf::FeatureMap rgb(1, 3, 2, 2);
  rgb.at(0, 0, 0, 0) = 10 / 255.0f;
  rgb.at(0, 1, 0, 0) = 20 / 255.0f;
  rgb.at(0, 2, 0, 0) = 30 / 255.0f;
  wf::write_image(rgb, temp_dir() / "c.ppm");
  const auto rgb_back = wf::read_image(temp_dir() / "c.ppm");
  REQUIRE(rgb_back.channels() == 3);
  CHECK(rgb_back.at(0, 0, 0, 0) == doctest::Approx(10 / 255.0).epsilon(1e-6));
  CHECK(rgb_back.at(0, 1, 0, 0) == doctest::Approx(20 / 255.0).epsilon(1e-6));
  CHECK(rgb_back.at(0, 2, 0, 0) == doctest::Approx(30 / 255.0).epsilon(1e-6));
}

TEST_CASE("pnm header validation") {
  const auto dir = temp_dir();
  write_raw(dir / "bad1.pgm", "P2\n2 2\n255\nxxxx");
  CHECK_THROWS_AS(wf::read_image(dir / "bad1.pgm"), wf::FormatError);
  write_raw(dir / "bad2.pgm", "P5\n2 2\n65535\n\0\0\0\0\0\0\0\0");
  CHECK_THROWS_AS(wf::read_image(dir / "bad2.pgm"), wf::FormatError);
  write_raw(dir / "bad3.pgm", std::string("P5\n4 4\n255\n") + "abc");
  CHECK_THROWS_AS(wf::read_image(dir / "bad3.pgm"), wf::TruncationError);
  // Comment lines in the header are legal.
  write_raw(dir / "ok.pgm", std::string("P5\n# made by hand\n1 1\n255\n") +
                                std::string(1, static_cast<char>(128)));
  const auto ok = wf::read_image(dir / "ok.pgm");
  CHECK(ok.at(0, 0, 0, 0) == doctest::Approx(128 / 255.0));
}

TEST_CASE("bounding box geometry") {
  wf::BoundingBox a{0.0, 0.0, 4.0, 4.0, std::nullopt};
  wf::BoundingBox b{2.0, 2.0, 6.0, 6.0, std::nullopt};
  CHECK(a.area() == 16.0);
  // overlap 2x2=4, union 16+16-4=28
  CHECK(wf::box_iou(a, b) == doctest::Approx(4.0 / 28.0));
  CHECK(wf::box_iou(a, a) == doctest::Approx(1.0));

  wf::BoundingBox disjoint{10.0, 10.0, 12.0, 12.0, std::nullopt};
  CHECK(wf::box_iou(a, disjoint) == 0.0);

  wf::BoundingBox degenerate{1.0, 1.0, 1.0, 5.0, std::nullopt};
  CHECK(!degenerate.well_formed());
  CHECK(wf::box_iou(a, degenerate) == 0.0);

  CHECK(a.intersects_frame(8, 8));
  CHECK(!disjoint.intersects_frame(8, 8));
}

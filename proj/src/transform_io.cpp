#include "wf/transform_io.hpp"

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "io_util.hpp"
#include "wf/errors.hpp"

namespace wf {

using nlohmann::json;

TransformTrack read_track(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    if (!doc.is_object() || doc.at("version").get<int>() != 1) {
      throw FormatError(path.string() + ": unsupported track version");
    }
    const auto kind_str = doc.at("kind").get<std::string>();
    if (kind_str != "affine" && kind_str != "homography") {
      throw FormatError(path.string() + ": unknown kind '" + kind_str + "'");
    }
    if (doc.at("coords").get<std::string>() != "normalized_corner_aligned") {
      throw FormatError(path.string() + ": unsupported coordinate convention");
    }
    const bool is_affine = kind_str == "affine";
    const std::size_t want = is_affine ? 6 : 9;
    const auto& frames = doc.at("frames");
    if (!frames.is_array() || frames.empty()) {
      throw FormatError(path.string() + ": frames must be a nonempty array");
    }
    std::vector<FrameTransform> track;
    track.reserve(frames.size());
    for (const auto& row : frames) {
      if (!row.is_array() || row.size() != want) {
        throw FormatError(path.string() + ": each frame needs " +
                          std::to_string(want) + " numbers");
      }
      if (is_affine) {
        std::array<double, 6> p;
        for (std::size_t i = 0; i < 6; ++i) p[i] = row[i].get<double>();
        track.push_back(FrameTransform::affine(p));
      } else {
        std::array<double, 9> p;
        for (std::size_t i = 0; i < 9; ++i) p[i] = row[i].get<double>();
        track.push_back(FrameTransform::homography(p));
      }
    }
    return TransformTrack(std::move(track));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_track(const TransformTrack& track,
                 const std::filesystem::path& path) {
  json frames = json::array();
  for (const auto& tf : track) {
    json row = json::array();
    for (double v : tf.params()) row.push_back(v);
    frames.push_back(std::move(row));
  }
  json doc = {
      {"version", 1},
      {"kind",
       track.kind() == TransformKind::affine ? "affine" : "homography"},
      {"coords", "normalized_corner_aligned"},
      {"frames", std::move(frames)},
  };
  detail::write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace wf

#pragma once

#include <filesystem>

#include "wf/transform.hpp"

namespace wf {

// Track JSON schema:
//   {"version":1, "kind":"affine"|"homography",
//    "coords":"normalized_corner_aligned", "frames":[[p...], ...]}
// with 6 numbers per frame for affine, 9 for homography. Values round-trip
// bit-exact for finite doubles. Schema violations throw FormatError.
TransformTrack read_track(const std::filesystem::path& path);
void write_track(const TransformTrack& track,
                 const std::filesystem::path& path);

}  // namespace wf

#pragma once

#include <filesystem>
#include <vector>

#include "wf/tensor.hpp"

namespace wf {

// Bounding-box JSON: {"version":1, "boxes":[{"t":int|null,
// "y0":..., "x0":..., "y1":..., "x1":...}, ...]} in pixel coordinates.
std::vector<BoundingBox> read_boxes(const std::filesystem::path& path);
void write_boxes(const std::vector<BoundingBox>& boxes,
                 const std::filesystem::path& path);

}  // namespace wf

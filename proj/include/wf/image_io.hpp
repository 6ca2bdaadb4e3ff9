#pragma once

#include <filesystem>
#include <vector>

#include "wf/tensor.hpp"

namespace wf {

// Reads a binary PGM (P5) or PPM (P6) image with maxval 255 into a
// 1 x C x H x W tensor, C = 1 or 3, values mapped to [0,1] by /255.
FeatureMap read_image(const std::filesystem::path& path);

// Writes a 1 x C x H x W tensor (C = 1 or 3) as PGM/PPM with maxval 255.
// Values are clamped to [0,1] and rounded to the nearest 8-bit level.
void write_image(const FeatureMap& img, const std::filesystem::path& path);

// Loads every .pgm/.ppm file in a directory in lexicographic filename order
// and stacks them into a T x C x H x W clip. All frames must agree on
// dimensions and channel count. Empty directory is a format error.
FeatureMap read_image_dir(const std::filesystem::path& dir);

// Filenames that read_image_dir would pick up, in the order it uses.
std::vector<std::filesystem::path> list_image_files(
    const std::filesystem::path& dir);

}  // namespace wf

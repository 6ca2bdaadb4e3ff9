#pragma once

#include <filesystem>

#include "wf/tensor.hpp"

namespace wf {

// Reads a "WFT1" tensor file: 4-byte magic, four uint32 LE dims (T,C,H,W),
// then T*C*H*W float32 LE values row-major. Bad magic throws FormatError;
// payload shorter or longer than the header claims throws TruncationError.
FeatureMap read_tensor(const std::filesystem::path& path);

// Writes the same format. The file appears atomically (temp + rename);
// failures throw IoError and leave no partial file at `path`.
void write_tensor(const FeatureMap& fm, const std::filesystem::path& path);

}  // namespace wf

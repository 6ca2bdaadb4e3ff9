#pragma once

#include <filesystem>
#include <string>

namespace wf::detail {

// Writes `bytes` to `path` via a sibling temp file plus rename, so readers
// never observe a partially written file. Throws IoError on any failure.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes);

// Reads a whole file into a string. Throws IoError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace wf::detail

#include "wf/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

#include "io_util.hpp"
#include "wf/errors.hpp"

namespace wf {
namespace {

constexpr char kMagic[4] = {'W', 'F', 'T', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 * sizeof(std::uint32_t);

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

}  // namespace

FeatureMap read_tensor(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(path.string() + ": not a WFT1 tensor file");
  }
  if (bytes.size() < kHeaderBytes) {
    throw TruncationError(path.string() + ": header cut short");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t t = read_u32le(p + 4);
  const std::uint32_t c = read_u32le(p + 8);
  const std::uint32_t h = read_u32le(p + 12);
  const std::uint32_t w = read_u32le(p + 16);
  if (t == 0 || c == 0 || h == 0 || w == 0) {
    throw FormatError(path.string() + ": zero dimension in header");
  }
  const std::uint64_t count =
      std::uint64_t(t) * c * h * w;
  const std::uint64_t want = kHeaderBytes + count * 4;
  if (bytes.size() != want) {
    throw TruncationError(path.string() + ": payload is " +
                          std::to_string(bytes.size() - kHeaderBytes) +
                          " bytes, header requires " +
                          std::to_string(count * 4));
  }
  std::vector<float> data(count);
  const unsigned char* q = p + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, q += 4) {
    data[i] = std::bit_cast<float>(read_u32le(q));
  }
  return FeatureMap(static_cast<int>(t), static_cast<int>(c),
                    static_cast<int>(h), static_cast<int>(w),
                    std::move(data));
}

void write_tensor(const FeatureMap& fm, const std::filesystem::path& path) {
  std::string bytes;
  bytes.reserve(kHeaderBytes + fm.size() * 4);
  bytes.append(kMagic, 4);
  append_u32le(bytes, static_cast<std::uint32_t>(fm.frames()));
  append_u32le(bytes, static_cast<std::uint32_t>(fm.channels()));
  append_u32le(bytes, static_cast<std::uint32_t>(fm.height()));
  append_u32le(bytes, static_cast<std::uint32_t>(fm.width()));
  for (float v : fm.data()) {
    append_u32le(bytes, std::bit_cast<std::uint32_t>(v));
  }
  detail::write_file_atomic(path, bytes);
}

}  // namespace wf

#include "wf/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "io_util.hpp"
#include "wf/errors.hpp"

namespace wf {
namespace {

// Skips whitespace and '#' comment lines, then parses one decimal token.
int parse_pnm_int(const std::string& s, std::size_t& pos,
                  const std::string& what) {
  while (pos < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    } else if (s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  std::size_t start = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    ++pos;
  }
  if (pos == start) {
    throw FormatError("PNM header: missing " + what);
  }
  return std::stoi(s.substr(start, pos - start));
}

}  // namespace

FeatureMap read_image(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '5' && bytes[1] != '6')) {
    throw FormatError(path.string() + ": expected binary PGM (P5) or PPM (P6)");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  const int w = parse_pnm_int(bytes, pos, "width");
  const int h = parse_pnm_int(bytes, pos, "height");
  const int maxval = parse_pnm_int(bytes, pos, "maxval");
  if (w < 1 || h < 1) {
    throw FormatError(path.string() + ": bad image dimensions");
  }
  if (maxval != 255) {
    throw FormatError(path.string() + ": only maxval 255 is supported, got " +
                      std::to_string(maxval));
  }
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError(path.string() + ": malformed PNM header");
  }
  ++pos;  // single whitespace byte separates header from raster
  const std::size_t count =
      static_cast<std::size_t>(w) * h * channels;
  if (bytes.size() - pos < count) {
    throw TruncationError(path.string() + ": raster cut short");
  }
  FeatureMap img(1, channels, h, w);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  // PNM raster interleaves channels per pixel; tensor stores planes.
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      for (int c = 0; c < channels; ++c) {
        img.at(0, c, i, j) =
            raster[(static_cast<std::size_t>(i) * w + j) * channels + c] /
            255.0f;
      }
    }
  }
  return img;
}

void write_image(const FeatureMap& img, const std::filesystem::path& path) {
  if (img.frames() != 1 || (img.channels() != 1 && img.channels() != 3)) {
    throw ContractError("write_image wants a 1x{1|3}xHxW tensor");
  }
  const int h = img.height(), w = img.width(), channels = img.channels();
  std::string bytes;
  bytes += channels == 1 ? "P5\n" : "P6\n";
  bytes += std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  bytes.reserve(bytes.size() + static_cast<std::size_t>(h) * w * channels);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      for (int c = 0; c < channels; ++c) {
        const float v = std::clamp(img.at(0, c, i, j), 0.0f, 1.0f);
        bytes.push_back(static_cast<char>(
            static_cast<unsigned char>(std::lround(v * 255.0f))));
      }
    }
  }
  detail::write_file_atomic(path, bytes);
}

std::vector<std::filesystem::path> list_image_files(
    const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IoError(dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".pgm" || ext == ".ppm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

FeatureMap read_image_dir(const std::filesystem::path& dir) {
  const auto files = list_image_files(dir);
  if (files.empty()) {
    throw FormatError(dir.string() + ": no .pgm/.ppm files");
  }
  FeatureMap first = read_image(files[0]);
  FeatureMap clip(static_cast<int>(files.size()), first.channels(),
                  first.height(), first.width());
  std::copy(first.frame(0).begin(), first.frame(0).end(),
            clip.frame(0).begin());
  for (std::size_t t = 1; t < files.size(); ++t) {
    FeatureMap img = read_image(files[t]);
    if (!img.same_dims(first)) {
      throw FormatError(files[t].string() + ": dimensions differ from " +
                        files[0].string());
    }
    std::copy(img.frame(0).begin(), img.frame(0).end(),
              clip.frame(static_cast<int>(t)).begin());
  }
  return clip;
}

}  // namespace wf

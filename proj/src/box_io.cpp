#include "wf/box_io.hpp"

#include <string>

#include <json.hpp>

#include "io_util.hpp"
#include "wf/errors.hpp"

namespace wf {

using nlohmann::json;

std::vector<BoundingBox> read_boxes(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    if (!doc.is_object() || doc.at("version").get<int>() != 1) {
      throw FormatError(path.string() + ": unsupported box-file version");
    }
    const auto& rows = doc.at("boxes");
    if (!rows.is_array() || rows.empty()) {
      throw FormatError(path.string() + ": boxes must be a nonempty array");
    }
    std::vector<BoundingBox> boxes;
    boxes.reserve(rows.size());
    for (const auto& row : rows) {
      if (!row.is_object()) {
        throw FormatError(path.string() + ": each box must be an object");
      }
      BoundingBox b;
      b.y0 = row.at("y0").get<double>();
      b.x0 = row.at("x0").get<double>();
      b.y1 = row.at("y1").get<double>();
      b.x1 = row.at("x1").get<double>();
      if (row.contains("t") && !row.at("t").is_null()) {
        b.t = row.at("t").get<int>();
      }
      boxes.push_back(b);
    }
    return boxes;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_boxes(const std::vector<BoundingBox>& boxes,
                 const std::filesystem::path& path) {
  json rows = json::array();
  for (const auto& b : boxes) {
    json row = {{"y0", b.y0}, {"x0", b.x0}, {"y1", b.y1}, {"x1", b.x1}};
    row["t"] = b.t ? json(*b.t) : json(nullptr);
    rows.push_back(std::move(row));
  }
  json doc = {{"version", 1}, {"boxes", std::move(rows)}};
  detail::write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace wf

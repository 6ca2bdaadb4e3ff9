#include "wf/mininet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>

#include <json.hpp>

#include "io_util.hpp"
#include "wf/errors.hpp"
#include "wf/sampler.hpp"
#include "wf/tensor_io.hpp"
#include "wf/transform.hpp"
#include "wf/worldops.hpp"

namespace wf {

namespace {

using nlohmann::json;

int scaled(int channels, double width_scale) {
  return std::max(1, static_cast<int>(std::llround(channels * width_scale)));
}

bool needs_projection(int in_channels, int out_channels, int stride) {
  return in_channels != out_channels || stride != 1;
}

std::string kind_name(LayerSpec::Kind kind) {
  switch (kind) {
    case LayerSpec::Kind::conv: return "conv";
    case LayerSpec::Kind::max_pool: return "max";
    case LayerSpec::Kind::avg_pool: return "avg";
    case LayerSpec::Kind::stage: return "stage";
    case LayerSpec::Kind::gap: return "gap";
  }
  throw ContractError("unknown layer kind");
}

WorldFeature run_conv(const WorldFeature& x, const WeightBundle& bundle,
                      const std::string& name, int in, int out,
                      std::array<int, 3> kernel, std::array<int, 3> stride,
                      std::array<int, 3> padding) {
  const auto wit = bundle.weights.find(name);
  const auto bit = bundle.biases.find(name);
  if (wit == bundle.weights.end() || bit == bundle.biases.end()) {
    throw ContractError("weight bundle is missing " + name);
  }
  ConvSpec spec;
  spec.in = in;
  spec.out = out;
  spec.kt = kernel[0];
  spec.kh = kernel[1];
  spec.kw = kernel[2];
  spec.st = stride[0];
  spec.sh = stride[1];
  spec.sw = stride[2];
  spec.pt = padding[0];
  spec.ph = padding[1];
  spec.pw = padding[2];
  spec.weights = wit->second;
  spec.bias = bit->second;
  try {
    return world_conv3d(x, spec);
  } catch (const ContractError& e) {
    throw ContractError(name + ": " + e.what());
  }
}

void relu_inplace(WorldFeature& x) {
  for (auto& v : x.features.data()) v = std::max(0.0f, v);
}

// Joins the residual branches: features add, observations combine
// pessimistically, and the (identical) main-branch track is kept.
WorldFeature add_residual(WorldFeature main, const WorldFeature& shortcut) {
  if (!main.features.same_dims(shortcut.features)) {
    throw ContractError("residual branches disagree on dims");
  }
  auto& f = main.features.data();
  const auto& g = shortcut.features.data();
  for (std::size_t k = 0; k < f.size(); ++k) f[k] += g[k];
  for (int t = 0; t < main.validity.frames(); ++t) {
    auto v = main.validity.frame(t);
    const auto u = shortcut.validity.frame(t);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::min(v[k], u[k]);
  }
  return main;
}

WorldFeature run_stage(WorldFeature x, const LayerSpec& row,
                       double width_scale, const WeightBundle& bundle) {
  const int width = scaled(row.out, width_scale);
  const int inner = scaled(row.bottleneck, width_scale);
  for (int b = 0; b < row.blocks; ++b) {
    const std::string prefix = row.name + ".b" + std::to_string(b) + ".";
    const int s = b == 0 ? row.spatial_stride : 1;
    const int in = x.features.channels();

    auto y = run_conv(x, bundle, prefix + "conv1", in, inner, {1, 1, 1},
                      {1, 1, 1}, {0, 0, 0});
    relu_inplace(y);
    y = run_conv(y, bundle, prefix + "conv2", inner, inner, {3, 3, 3},
                 {1, s, s}, {1, 1, 1});
    relu_inplace(y);
    y = run_conv(y, bundle, prefix + "conv3", inner, width, {1, 1, 1},
                 {1, 1, 1}, {0, 0, 0});

    WorldFeature shortcut =
        needs_projection(in, width, s)
            ? run_conv(x, bundle, prefix + "proj", in, width, {1, 1, 1},
                       {1, s, s}, {0, 0, 0})
            : std::move(x);
    x = add_residual(std::move(y), shortcut);
    relu_inplace(x);
  }
  return x;
}

PoolSpec pool_from_row(const LayerSpec& row) {
  PoolSpec spec;
  spec.kind = row.kind == LayerSpec::Kind::max_pool ? PoolSpec::Kind::max
                                                    : PoolSpec::Kind::avg;
  spec.kt = row.kernel[0];
  spec.kh = row.kernel[1];
  spec.kw = row.kernel[2];
  spec.st = row.stride[0];
  spec.sh = row.stride[1];
  spec.sw = row.stride[2];
  spec.pt = row.padding[0];
  spec.ph = row.padding[1];
  spec.pw = row.padding[2];
  return spec;
}

[[noreturn]] void fail(const std::filesystem::path& path,
                       const std::string& what) {
  throw FormatError(path.string() + ": " + what);
}

int require_int(const json& row, const char* key,
                const std::filesystem::path& path, int least) {
  if (!row.contains(key) || !row[key].is_number_integer()) {
    fail(path, std::string("layer needs an integer \"") + key + "\"");
  }
  const int value = row[key].get<int>();
  if (value < least) {
    fail(path, std::string("\"") + key + "\" must be >= " +
                   std::to_string(least));
  }
  return value;
}

std::array<int, 3> require_triple(const json& row, const char* key,
                                  const std::filesystem::path& path,
                                  int least) {
  if (!row.contains(key) || !row[key].is_array() || row[key].size() != 3) {
    fail(path, std::string("layer needs a 3-element \"") + key + "\"");
  }
  std::array<int, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const auto& v = row[key][k];
    if (!v.is_number_integer() || v.get<int>() < least) {
      fail(path, std::string("\"") + key + "\" entries must be integers >= " +
                     std::to_string(least));
    }
    out[k] = v.get<int>();
  }
  return out;
}

}  // namespace

MiniNetConfig MiniNetConfig::canonical() {
  MiniNetConfig cfg;
  cfg.classes = 10;
  cfg.width_scale = 1.0;

  LayerSpec conv1;
  conv1.name = "conv1";
  conv1.kind = LayerSpec::Kind::conv;
  conv1.out = 4;
  conv1.kernel = {5, 7, 7};
  conv1.stride = {2, 2, 2};
  conv1.padding = {2, 3, 3};
  cfg.layers.push_back(conv1);

  LayerSpec pool1;
  pool1.name = "pool1";
  pool1.kind = LayerSpec::Kind::max_pool;
  pool1.kernel = {3, 3, 3};
  pool1.stride = {2, 2, 2};
  pool1.padding = {1, 1, 1};
  cfg.layers.push_back(pool1);

  auto stage = [](const char* name, int out, int blocks, int bottleneck,
                  int spatial_stride) {
    LayerSpec row;
    row.name = name;
    row.kind = LayerSpec::Kind::stage;
    row.out = out;
    row.blocks = blocks;
    row.bottleneck = bottleneck;
    row.spatial_stride = spatial_stride;
    return row;
  };
  cfg.layers.push_back(stage("res2", 8, 3, 2, 1));

  LayerSpec pool2;
  pool2.name = "pool2";
  pool2.kind = LayerSpec::Kind::max_pool;
  pool2.kernel = {3, 1, 1};
  pool2.stride = {2, 1, 1};
  pool2.padding = {1, 0, 0};
  cfg.layers.push_back(pool2);

  cfg.layers.push_back(stage("res3", 16, 4, 4, 2));
  cfg.layers.push_back(stage("res4", 32, 6, 8, 2));
  cfg.layers.push_back(stage("res5", 64, 3, 16, 2));

  LayerSpec gap;
  gap.name = "gap";
  gap.kind = LayerSpec::Kind::gap;
  cfg.layers.push_back(gap);
  return cfg;
}

MiniNetConfig read_mininet_config(const std::filesystem::path& path) {
  const json doc = json::parse(detail::read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(path, "not a JSON object");
  if (!doc.contains("version") || doc["version"] != 1) {
    fail(path, "unsupported version");
  }
  MiniNetConfig cfg;
  if (!doc.contains("classes") || !doc["classes"].is_number_integer() ||
      doc["classes"].get<int>() < 1) {
    fail(path, "\"classes\" must be a positive integer");
  }
  cfg.classes = doc["classes"].get<int>();
  if (!doc.contains("width_scale") || !doc["width_scale"].is_number() ||
      !(doc["width_scale"].get<double>() > 0.0)) {
    fail(path, "\"width_scale\" must be a positive number");
  }
  cfg.width_scale = doc["width_scale"].get<double>();
  if (!doc.contains("layers") || !doc["layers"].is_array() ||
      doc["layers"].empty()) {
    fail(path, "\"layers\" must be a nonempty array");
  }

  std::set<std::string> seen;
  for (const auto& row : doc["layers"]) {
    if (!row.is_object()) fail(path, "layer rows must be objects");
    if (!row.contains("name") || !row["name"].is_string() ||
        row["name"].get<std::string>().empty()) {
      fail(path, "every layer needs a nonempty \"name\"");
    }
    LayerSpec spec;
    spec.name = row["name"].get<std::string>();
    if (!seen.insert(spec.name).second) {
      fail(path, "duplicate layer name " + spec.name);
    }
    if (!row.contains("kind") || !row["kind"].is_string()) {
      fail(path, spec.name + ": layer needs a \"kind\"");
    }
    const auto kind = row["kind"].get<std::string>();
    if (kind == "conv") {
      spec.kind = LayerSpec::Kind::conv;
      spec.out = require_int(row, "out", path, 1);
      spec.kernel = require_triple(row, "kernel", path, 1);
      spec.stride = require_triple(row, "stride", path, 1);
      spec.padding = require_triple(row, "padding", path, 0);
    } else if (kind == "max" || kind == "avg") {
      spec.kind = kind == "max" ? LayerSpec::Kind::max_pool
                                : LayerSpec::Kind::avg_pool;
      spec.kernel = require_triple(row, "kernel", path, 1);
      spec.stride = require_triple(row, "stride", path, 1);
      spec.padding = require_triple(row, "padding", path, 0);
    } else if (kind == "stage") {
      spec.kind = LayerSpec::Kind::stage;
      spec.out = require_int(row, "out", path, 1);
      spec.blocks = require_int(row, "blocks", path, 1);
      spec.bottleneck = require_int(row, "bottleneck", path, 1);
      spec.spatial_stride = require_int(row, "spatial_stride", path, 1);
    } else if (kind == "gap") {
      spec.kind = LayerSpec::Kind::gap;
    } else {
      fail(path, spec.name + ": unknown kind \"" + kind + "\"");
    }
    cfg.layers.push_back(std::move(spec));
  }
  return cfg;
}

void write_mininet_config(const MiniNetConfig& cfg,
                          const std::filesystem::path& path) {
  json rows = json::array();
  for (const auto& spec : cfg.layers) {
    json row{{"name", spec.name}, {"kind", kind_name(spec.kind)}};
    switch (spec.kind) {
      case LayerSpec::Kind::conv:
        row["out"] = spec.out;
        [[fallthrough]];
      case LayerSpec::Kind::max_pool:
      case LayerSpec::Kind::avg_pool:
        row["kernel"] = spec.kernel;
        row["stride"] = spec.stride;
        row["padding"] = spec.padding;
        break;
      case LayerSpec::Kind::stage:
        row["out"] = spec.out;
        row["blocks"] = spec.blocks;
        row["bottleneck"] = spec.bottleneck;
        row["spatial_stride"] = spec.spatial_stride;
        break;
      case LayerSpec::Kind::gap:
        break;
    }
    rows.push_back(std::move(row));
  }
  const json doc{{"version", 1},
                 {"classes", cfg.classes},
                 {"width_scale", cfg.width_scale},
                 {"layers", std::move(rows)}};
  detail::write_file_atomic(path, doc.dump(2) + "\n");
}

WeightBundle load_weight_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw IoError("weight bundle " + dir.string() + " is not a directory");
  }
  WeightBundle bundle;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    const auto strip = [&](const std::string& suffix) -> std::string {
      if (name.size() <= suffix.size() ||
          name.compare(name.size() - suffix.size(), suffix.size(), suffix)) {
        return {};
      }
      return name.substr(0, name.size() - suffix.size());
    };
    if (const auto stem = strip(".weight.wft"); !stem.empty()) {
      bundle.weights[stem] = read_tensor(entry.path());
    } else if (const auto stem = strip(".bias.wft"); !stem.empty()) {
      const auto fm = read_tensor(entry.path());
      if (fm.frames() != 1 || fm.height() != 1 || fm.width() != 1) {
        throw FormatError(entry.path().string() +
                          ": bias tensors must be (1, out, 1, 1)");
      }
      bundle.biases[stem] = fm.data();
    }
  }
  if (bundle.weights.empty() && bundle.biases.empty()) {
    throw IoError("weight bundle " + dir.string() +
                  " holds no .weight.wft or .bias.wft files");
  }
  return bundle;
}

void save_weight_bundle(const WeightBundle& bundle,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, fm] : bundle.weights) {
    write_tensor(fm, dir / (name + ".weight.wft"));
  }
  for (const auto& [name, bias] : bundle.biases) {
    write_tensor(FeatureMap(1, static_cast<int>(bias.size()), 1, 1, bias),
                 dir / (name + ".bias.wft"));
  }
}

WeightBundle generate_weights(const MiniNetConfig& cfg, int in_channels,
                              std::uint64_t seed) {
  if (in_channels < 1) throw ContractError("need at least one input channel");
  if (cfg.classes < 1) throw ContractError("config needs at least one class");
  std::mt19937_64 eng(seed);
  const auto u01 = [&eng] {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  };
  const auto normal = [&u01] {
    const double u1 = 1.0 - u01();  // (0, 1]: keeps the log finite
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  };

  WeightBundle bundle;
  const auto fill = [&](const std::string& name, int out, int in, int kt,
                        int kh, int kw) {
    FeatureMap weights(out, in * kt, kh, kw);
    const double scale = std::sqrt(2.0 / (double(in) * kt * kh * kw));
    for (auto& v : weights.data()) v = static_cast<float>(scale * normal());
    bundle.weights[name] = std::move(weights);
    bundle.biases[name] = std::vector<float>(out, 0.0f);
  };

  int ch = in_channels + 1;  // the forward pass appends the validity channel
  for (const auto& row : cfg.layers) {
    switch (row.kind) {
      case LayerSpec::Kind::conv: {
        const int out = scaled(row.out, cfg.width_scale);
        fill(row.name, out, ch, row.kernel[0], row.kernel[1], row.kernel[2]);
        ch = out;
        break;
      }
      case LayerSpec::Kind::stage: {
        const int width = scaled(row.out, cfg.width_scale);
        const int inner = scaled(row.bottleneck, cfg.width_scale);
        for (int b = 0; b < row.blocks; ++b) {
          const std::string prefix = row.name + ".b" + std::to_string(b) + ".";
          const int s = b == 0 ? row.spatial_stride : 1;
          fill(prefix + "conv1", inner, ch, 1, 1, 1);
          fill(prefix + "conv2", inner, inner, 3, 3, 3);
          fill(prefix + "conv3", width, inner, 1, 1, 1);
          if (needs_projection(ch, width, s)) {
            fill(prefix + "proj", width, ch, 1, 1, 1);
          }
          ch = width;
        }
        break;
      }
      case LayerSpec::Kind::max_pool:
      case LayerSpec::Kind::avg_pool:
      case LayerSpec::Kind::gap:
        break;
    }
  }
  fill("fc", cfg.classes, ch, 1, 1, 1);
  return bundle;
}

WorldFeature world_global_avgpool(const WorldFeature& wf) {
  const int t = wf.features.frames(), c = wf.features.channels();
  const int h = wf.features.height(), w = wf.features.width();
  const int center = t / 2;
  const auto aligned = warp_clip_to_reference(wf, center, InterpMode::nearest);

  FeatureMap out(1, c, 1, 1);
  for (int cc = 0; cc < c; ++cc) {
    double acc = 0.0;
    long long count = 0;
    for (int u = 0; u < t; ++u) {
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          if (aligned.validity.at(u, i, j) <= 0.5f) continue;
          acc += aligned.features.at(u, cc, i, j);
          ++count;
        }
      }
    }
    out.at(0, cc, 0, 0) = count > 0 ? static_cast<float>(acc / count) : 0.0f;
  }

  double vsum = 0.0;
  for (const float v : aligned.validity.data()) vsum += v;
  ValidityMask out_v(1, 1, 1,
                     static_cast<float>(vsum / (double(t) * h * w)));
  return WorldFeature(std::move(out),
                      TransformTrack(std::vector<FrameTransform>{
                          wf.track[center]}),
                      std::move(out_v));
}

ForwardResult forward_mini_net(const WorldFeature& wf,
                               const MiniNetConfig& cfg,
                               const WeightBundle& weights) {
  if (cfg.classes < 1) throw ContractError("config needs at least one class");
  if (cfg.layers.empty()) throw ContractError("config has no layers");

  auto x = attach_validity_channel(wf);
  ForwardResult result;
  result.track_sizes.push_back(static_cast<int>(x.track.size()));

  for (const auto& row : cfg.layers) {
    switch (row.kind) {
      case LayerSpec::Kind::conv:
        x = run_conv(x, weights, row.name, x.features.channels(),
                     scaled(row.out, cfg.width_scale), row.kernel, row.stride,
                     row.padding);
        relu_inplace(x);
        break;
      case LayerSpec::Kind::max_pool:
        x = world_maxpool3d(x, pool_from_row(row));
        break;
      case LayerSpec::Kind::avg_pool:
        x = world_avgpool3d(x, pool_from_row(row));
        break;
      case LayerSpec::Kind::stage:
        x = run_stage(std::move(x), row, cfg.width_scale, weights);
        break;
      case LayerSpec::Kind::gap:
        x = world_global_avgpool(x);
        break;
    }
    result.track_sizes.push_back(static_cast<int>(x.track.size()));
  }

  if (x.features.frames() != 1 || x.features.height() != 1 ||
      x.features.width() != 1) {
    throw ContractError("classifier expects a single pooled frame");
  }
  const auto scores = run_conv(x, weights, "fc", x.features.channels(),
                               cfg.classes, {1, 1, 1}, {1, 1, 1}, {0, 0, 0});
  result.logits.resize(cfg.classes);
  for (int k = 0; k < cfg.classes; ++k) {
    result.logits[k] = scores.features.at(0, k, 0, 0);
  }
  return result;
}

}  // namespace wf

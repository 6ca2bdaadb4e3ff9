#pragma once

// A reduced-width 3-D residual classifier assembled from world ops. Every
// layer consumes and produces a WorldFeature, so feature maps stay paired
// with their transform track and validity mask all the way to the logits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wf/tensor.hpp"
#include "wf/world_feature.hpp"

namespace wf {

// One row of the network table. `kernel`, `stride`, and `padding` are
// (t, h, w) triples for conv and pool rows; stage rows instead describe a
// run of bottleneck blocks (1x1x1 reduce, 3x3x3, 1x1x1 expand, residual
// add), where the first block applies `spatial_stride` and, whenever width
// or stride changes, a 1x1x1 projection shortcut. `gap` collapses the clip
// to a single frame and pixel.
struct LayerSpec {
  enum class Kind { conv, max_pool, avg_pool, stage, gap };

  std::string name;
  Kind kind = Kind::conv;
  int out = 0;  // conv and stage rows; channel counts before width scaling
  std::array<int, 3> kernel{1, 1, 1};
  std::array<int, 3> stride{1, 1, 1};
  std::array<int, 3> padding{0, 0, 0};
  int blocks = 0;          // stage rows
  int bottleneck = 0;      // stage rows; inner width before scaling
  int spatial_stride = 1;  // stage rows; first block only

  bool operator==(const LayerSpec&) const = default;
};

struct MiniNetConfig {
  int classes = 0;
  double width_scale = 1.0;
  std::vector<LayerSpec> layers;

  bool operator==(const MiniNetConfig&) const = default;

  // The stock table: a 5x7x7 stride-2 stem, two max pools, and four
  // bottleneck stages, sized so a 64-frame clip passes through tracks of
  // length 64, 32, 16, 16, 8, 8, 8, 8 and finally 1.
  static MiniNetConfig canonical();
};

// JSON round-trip. Reading validates the document shape and every row and
// throws FormatError with the offending path and field on any violation.
MiniNetConfig read_mininet_config(const std::filesystem::path& path);
void write_mininet_config(const MiniNetConfig& cfg,
                          const std::filesystem::path& path);

// Network parameters keyed by layer name ("conv1", "res3.b0.conv2",
// "res2.b0.proj", "fc"). Weights are stored as (out, in*kt, kh, kw): the
// weight channel ci*kt + dt holds the filter slice for input channel ci at
// temporal tap dt.
struct WeightBundle {
  std::map<std::string, FeatureMap> weights;
  std::map<std::string, std::vector<float>> biases;
};

// Directory of "<name>.weight.wft" / "<name>.bias.wft" tensor files; biases
// travel as (1, out, 1, 1). Loading rejects a directory holding neither.
WeightBundle load_weight_bundle(const std::filesystem::path& dir);
void save_weight_bundle(const WeightBundle& bundle,
                        const std::filesystem::path& dir);

// Deterministic random init for a config applied to `in_channels`-channel
// clips (the validity channel is appended internally, as in the forward
// pass). Draws from mt19937_64(seed) mapped to [0,1) via
// (x >> 11) * 2^-53, converted to normals by Box-Muller, scaled by
// sqrt(2 / fan_in); biases are zero. Tensors fill in network order.
WeightBundle generate_weights(const MiniNetConfig& cfg, int in_channels,
                              std::uint64_t seed);

// Collapses a clip to one frame and one pixel: warps every frame into the
// coordinates of the middle frame (nearest), then averages each channel
// over the positions whose warped validity exceeds 0.5 (none -> 0).
// Output is (1, C, 1, 1); its validity is the plain mean of the warped
// masks and its track keeps only the middle frame's transform.
WorldFeature world_global_avgpool(const WorldFeature& wf);

struct ForwardResult {
  std::vector<float> logits;           // one score per class
  std::vector<int> track_sizes;        // input length, then one per row
};

// Runs attach_validity_channel, the configured rows, and a final 1x1x1
// classifier conv ("fc"). Reports the transform-track length of the input
// and of every row's output; the classifier preserves the last one and is
// not reported. Missing or misshapen weights throw ContractError.
ForwardResult forward_mini_net(const WorldFeature& wf,
                               const MiniNetConfig& cfg,
                               const WeightBundle& weights);

}  // namespace wf

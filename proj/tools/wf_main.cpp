#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "io_util.hpp"
#include "wf/box_io.hpp"
#include "wf/errors.hpp"
#include "wf/gaze.hpp"
#include "wf/image_io.hpp"
#include "wf/mininet.hpp"
#include "wf/sampler.hpp"
#include "wf/stabilize.hpp"
#include "wf/tensor.hpp"
#include "wf/tensor_io.hpp"
#include "wf/transform.hpp"
#include "wf/transform_io.hpp"
#include "wf/world_feature.hpp"
#include "wf/worldops.hpp"

namespace fs = std::filesystem;

namespace {

int parse_reference(const std::string& text, int frames) {
  if (text == "center") return frames / 2;
  int value = 0;
  try {
    value = std::stoi(text);
  } catch (...) {
    throw wf::ContractError("--reference must be 'center' or a frame index");
  }
  if (value < 0 || value >= frames) {
    throw wf::ContractError("--reference " + text + " is outside the " +
                            std::to_string(frames) + "-frame clip");
  }
  return value;
}

void add_stabilize(CLI::App& app) {
  struct Opts {
    std::string input, out;
    std::string kind = "affine";
    std::string reference = "center";
    double delta = 0.01;
    int levels = 3;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "stabilize", "Estimate per-frame stabilizing transforms for a clip");
  cmd->add_option("input", opts->input, "directory of .pgm/.ppm frames")
      ->required();
  cmd->add_option("--out", opts->out, "output transform track JSON")
      ->required();
  cmd->add_option("--kind", opts->kind, "transform family")
      ->check(CLI::IsMember({"affine", "homography"}))
      ->capture_default_str();
  cmd->add_option("--delta", opts->delta, "robust residual clip threshold")
      ->capture_default_str();
  cmd->add_option("--levels", opts->levels, "pyramid levels")
      ->capture_default_str();
  cmd->add_option("--reference", opts->reference,
                  "reference frame: 'center' or an index")
      ->capture_default_str();
  cmd->callback([opts] {
    const auto clip = wf::read_image_dir(opts->input);
    wf::AlignConfig cfg;
    cfg.delta = opts->delta;
    cfg.levels = opts->levels;
    cfg.kind = opts->kind == "affine" ? wf::TransformKind::affine
                                      : wf::TransformKind::homography;
    const int reference = parse_reference(opts->reference, clip.frames());
    const auto track = wf::stabilize_clip(clip, reference, cfg);
    wf::write_track(track, opts->out);
  });
}

void add_stabilize_render(CLI::App& app) {
  struct Opts {
    std::string input, track, out;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "stabilize-render",
      "Warp frames into the reference coordinates of a transform track");
  cmd->add_option("input", opts->input, "directory of .pgm/.ppm frames")
      ->required();
  cmd->add_option("--track", opts->track, "transform track JSON")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->callback([opts] {
    const auto clip = wf::read_image_dir(opts->input);
    const auto track = wf::read_track(opts->track);
    if (static_cast<int>(track.size()) != clip.frames()) {
      throw wf::ContractError(
          "track has " + std::to_string(track.size()) + " frames, clip has " +
          std::to_string(clip.frames()));
    }
    const auto names = wf::list_image_files(opts->input);
    fs::create_directories(fs::path(opts->out) / "validity");
    const auto ones =
        wf::ValidityMask::ones(clip.frames(), clip.height(), clip.width());
    for (int u = 0; u < clip.frames(); ++u) {
      wf::FeatureMap frame(1, clip.channels(), clip.height(), clip.width());
      wf::ValidityMask mask(1, clip.height(), clip.width(), 0.0f);
      wf::warp_frame_into(clip, ones, u, track[u], wf::InterpMode::nearest,
                          frame, mask, 0);
      const auto name = names[u].filename();
      wf::write_image(frame, fs::path(opts->out) / name);
      wf::FeatureMap mask_img(1, 1, clip.height(), clip.width(),
                              std::vector<float>(mask.data()));
      wf::write_image(mask_img, fs::path(opts->out) / "validity" /
                                    name.stem().concat(".pgm"));
    }
  });
}

void add_pursuit(CLI::App& app) {
  struct Opts {
    std::string boxes, out;
    int height = 0, width = 0;
    double smoothing = 0.0;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "pursuit", "Build a smooth-pursuit track from per-frame boxes");
  cmd->add_option("--boxes", opts->boxes, "box JSON, one box per frame")
      ->required();
  cmd->add_option("--out", opts->out, "output transform track JSON")
      ->required();
  cmd->add_option("--height", opts->height, "frame height in pixels")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--width", opts->width, "frame width in pixels")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--smoothing", opts->smoothing,
                  "exponential smoothing in [0,1)")
      ->capture_default_str();
  cmd->callback([opts] {
    const auto boxes = wf::read_boxes(opts->boxes);
    const auto track =
        wf::pursuit_track(boxes, opts->height, opts->width, opts->smoothing);
    wf::write_track(track, opts->out);
  });
}

void add_fixate(CLI::App& app) {
  struct Opts {
    std::string input, out;
    double fraction = 0.8;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "fixate", "Fixate on the box holding most of the temporal variance");
  cmd->add_option("input", opts->input, "directory of .pgm/.ppm frames")
      ->required();
  cmd->add_option("--out", opts->out, "output transform track JSON")
      ->required();
  cmd->add_option("--fraction", opts->fraction,
                  "fraction of temporal-difference mass to cover")
      ->capture_default_str();
  cmd->callback([opts] {
    const auto clip = wf::read_image_dir(opts->input);
    wf::FrameTransform tf = wf::FrameTransform::identity();
    try {
      const auto saliency = wf::temporal_diff_saliency(clip);
      const auto box = wf::variance_box(saliency, opts->fraction);
      tf = wf::fixation_transform(box, clip.height(), clip.width());
    } catch (const wf::DegenerateInputError&) {
      // static clip: no motion to fixate on, watch the whole frame
    }
    wf::write_track(
        wf::TransformTrack(std::vector<wf::FrameTransform>(clip.frames(), tf)),
        opts->out);
  });
}

void add_saccades(CLI::App& app) {
  struct Opts {
    std::string boxes, image, out, clip;
    int frames = 64;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "saccades",
      "Order boxes by overlap and scan a still image along them");
  cmd->add_option("--boxes", opts->boxes, "box JSON, one box per frame")
      ->required();
  cmd->add_option("--image", opts->image, "still .pgm/.ppm image")
      ->required();
  cmd->add_option("--frames", opts->frames, "clip length")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts->out, "output transform track JSON")
      ->required();
  cmd->add_option("--clip", opts->clip,
                  "also write the replicated image clip to this .wft path");
  cmd->callback([opts] {
    const auto boxes = wf::read_boxes(opts->boxes);
    if (static_cast<int>(boxes.size()) != opts->frames) {
      throw wf::ContractError("--frames is " + std::to_string(opts->frames) +
                              " but the box file holds " +
                              std::to_string(boxes.size()));
    }
    const auto image = wf::read_image(opts->image);
    const auto path = wf::order_saccades(boxes);
    const auto track =
        wf::saccade_track(path, image.height(), image.width());
    wf::write_track(track, opts->out);
    if (!opts->clip.empty()) {
      wf::write_tensor(wf::replicate_image(image, opts->frames), opts->clip);
    }
  });
}

void add_gen_motion(CLI::App& app) {
  struct Opts {
    std::string out;
    wf::MotionSpec spec;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "gen-motion", "Synthesize a random smooth camera-motion track");
  cmd->add_option("--frames", opts->spec.frames, "track length")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->spec.seed, "RNG seed")
      ->capture_default_str();
  cmd->add_option("--out", opts->out, "output transform track JSON")
      ->required();
  cmd->add_option("--waypoints", opts->spec.waypoints, "waypoint count")
      ->capture_default_str();
  cmd->add_option("--scale-min", opts->spec.scale_min, "smallest zoom")
      ->capture_default_str();
  cmd->add_option("--scale-max", opts->spec.scale_max, "largest zoom")
      ->capture_default_str();
  cmd->add_option("--extent", opts->spec.center_extent,
                  "waypoint center range in normalized coordinates")
      ->capture_default_str();
  cmd->callback([opts] {
    wf::write_track(wf::synth_motion_track(opts->spec), opts->out);
  });
}

void add_worldconv(CLI::App& app) {
  struct Opts {
    std::string input, track, config, weights, out, report;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "worldconv", "Run the world-op classifier over a clip tensor");
  cmd->add_option("--input", opts->input, "clip tensor (.wft)")->required();
  cmd->add_option("--track", opts->track, "transform track JSON")->required();
  cmd->add_option("--config", opts->config, "network config JSON")
      ->required();
  cmd->add_option("--weights", opts->weights, "weight bundle directory")
      ->required();
  cmd->add_option("--out", opts->out, "output logits tensor (.wft)")
      ->required();
  cmd->add_option("--report", opts->report,
                  "also write per-layer track lengths to this JSON path");
  cmd->callback([opts] {
    const auto clip = wf::read_tensor(opts->input);
    const auto track = wf::read_track(opts->track);
    const wf::WorldFeature input(
        clip, track,
        wf::ValidityMask::ones(clip.frames(), clip.height(), clip.width()));
    const auto cfg = wf::read_mininet_config(opts->config);
    const auto bundle = wf::load_weight_bundle(opts->weights);
    const auto result = wf::forward_mini_net(input, cfg, bundle);
    wf::write_tensor(
        wf::FeatureMap(1, cfg.classes, 1, 1, std::vector<float>(result.logits)),
        opts->out);
    if (!opts->report.empty()) {
      const nlohmann::json doc{{"version", 1},
                               {"track_sizes", result.track_sizes}};
      wf::detail::write_file_atomic(opts->report, doc.dump(2) + "\n");
    }
  });
}

void add_gen_weights(CLI::App& app) {
  struct Opts {
    std::string config, out;
    int channels = 0;
    std::uint64_t seed = 0;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "gen-weights", "Generate a random weight bundle for a network config");
  cmd->add_option("--config", opts->config, "network config JSON")
      ->required();
  cmd->add_option("--channels", opts->channels, "input clip channel count")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "RNG seed")->capture_default_str();
  cmd->add_option("--out", opts->out, "output bundle directory")->required();
  cmd->callback([opts] {
    const auto cfg = wf::read_mininet_config(opts->config);
    wf::save_weight_bundle(
        wf::generate_weights(cfg, opts->channels, opts->seed), opts->out);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"worldfeat: feature maps that stay aligned with the world"};
  app.require_subcommand(1);
  add_stabilize(app);
  add_stabilize_render(app);
  add_pursuit(app);
  add_fixate(app);
  add_saccades(app);
  add_gen_motion(app);
  add_worldconv(app);
  add_gen_weights(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const wf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

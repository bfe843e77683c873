#pragma once

#include "hytrav/appearance.hpp"
#include "hytrav/config.hpp"
#include "hytrav/planner.hpp"
#include "hytrav/synthgen.hpp"
#include "hytrav/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hytrav {

namespace fs = std::filesystem;

enum class Stream { Depth = 0, Seg = 1, Rough = 2, Pose = 3 };
inline constexpr int kNumStreams = 4;

std::string_view to_string(Stream s);

struct BagEntry {
  Stream stream = Stream::Depth;
  double stamp = 0.0;
  fs::path file;                        ///< relative to the bag root; empty for inline poses
  std::optional<fs::path> confidence;   ///< label streams: confidence PNG
  double scalar_confidence = 1.0;       ///< label streams without a confidence PNG
  std::optional<RigidTransform> pose;   ///< pose stream: base -> world, inline
};

/// A recording on disk: <root>/manifest.json plus the per-frame files it
/// references. Loading checks ordering and file existence; file contents
/// are parsed during replay so one bad frame only costs one step.
struct RecordedBag {
  fs::path root;
  std::vector<BagEntry> entries;

  static RecordedBag load(const fs::path& root);
  void save() const;
  void validate() const;
};

/// Renders every trajectory pose of the scene and writes a bag (depth PFM,
/// class and roughness PNGs, inline poses) under `dir`.
RecordedBag write_synthetic_bag(const synth::SceneSpec& scene, const Config& config, const fs::path& dir);

/// Everything produced for one synchronized tuple.
struct StepOutput {
  CostGrid appearance;
  CostGrid geometry;
  CostGrid hybrid;
  ImageCostMap appearance_image;
  PointCloud cloud_base;
};

/// Runs both branches and the fusion for one frame set.
StepOutput process_frame(const DepthFrame& depth, const LabelFrame& seg, const LabelFrame& rough,
                         const Config& config, int workers = 1);

struct PlanRecord {
  Cell goal_cell;
  bool goal_clipped = false;
  std::optional<Path> path;
  std::size_t hazard_cells = 0;        ///< known cells at or above the lethal threshold
  bool previous_path_blocked = false;  ///< last step's path now crosses an excluded cell
  bool previous_path_costlier = false; ///< last step's path crosses cells whose cost rose
  std::string error;
};

struct StepRecord {
  int index = 0;
  std::size_t tuple = 0;
  double stamps[kNumStreams] = {};
  RigidTransform base_to_world;
  StepOutput output;
  std::optional<PlanRecord> plan;
};

struct ReplayOptions {
  fs::path out_dir;                          ///< empty: nothing written
  std::optional<Eigen::Vector2d> goal_world; ///< plan toward this world xy each step
  std::optional<double> sync_tolerance;      ///< overrides config.sync.tolerance
  int workers = 1;
  std::ostream* log = nullptr;               ///< JSON lines with timings
};

struct ReplayResult {
  std::vector<StepRecord> steps;
  std::vector<std::pair<std::size_t, std::string>> skipped;  ///< tuple index, reason
  std::size_t tuples = 0;
};

/// Replays a bag: synchronize streams, process each tuple, optionally plan,
/// and write step-indexed outputs. Per-tuple failures are logged and skipped.
ReplayResult run_replay(const RecordedBag& bag, const Config& config, const ReplayOptions& options);

}  // namespace hytrav

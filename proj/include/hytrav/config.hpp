#pragma once

#include "hytrav/appearance.hpp"
#include "hytrav/fusion.hpp"
#include "hytrav/geometry.hpp"
#include "hytrav/planner.hpp"
#include "hytrav/roughness.hpp"
#include "hytrav/sync.hpp"
#include "hytrav/transform.hpp"

#include <json.hpp>

#include <filesystem>

namespace hytrav {

/// Camera 1.5 m above the base origin, looking forward, pitched 30 deg down.
RigidTransform default_camera_mount();

struct PlannerSettings {
  double lethal = 0.95;
  double epsilon = 0.05;
  /// Replay plans start on the robot's own cell, which the camera never
  /// sees, so unknown space is traversable at full cost by default here.
  UnknownPolicy unknown = UnknownPolicy::MaxCost;
};

/// Everything the engine needs, loaded from one JSON document. Angles are
/// given in degrees in the file and stored in radians. Every key is optional;
/// see README for the schema.
struct Config {
  CameraIntrinsics intrinsics{128.0, 128.0, 127.5, 127.5, 256, 256};
  RigidTransform camera_to_base = default_camera_mount();
  double depth_png_scale = 0.001;  ///< meters per 16-bit PNG unit

  SlopeCostParams slope;
  NormalParams normals;
  GridSpec grid;

  ReductionTable terrain_reductions = default_terrain_reductions();
  ReductionTable roughness_reductions = default_roughness_reductions();
  AppearanceWeights appearance_weights;
  RoughnessBins roughness_bins;
  FusionWeights fusion;
  PatchPolicy patches;
  PlannerSettings planner;
  SyncPolicy sync;

  void validate() const;
};

Config config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Config& c);
Config load_config(const std::filesystem::path& path);

/// {"rotation": [[...],[...],[...]], "translation": [x,y,z]} or
/// {"rpy_deg": [roll,pitch,yaw], "translation": [...], "optical": bool}.
/// With "optical": true the rpy orientation describes a body-style frame
/// (x forward) and the optical axis convention is appended.
RigidTransform transform_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RigidTransform& t);
nlohmann::json to_json(const GridSpec& g);

}  // namespace hytrav

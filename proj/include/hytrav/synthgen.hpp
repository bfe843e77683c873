#pragma once

#include "hytrav/appearance.hpp"
#include "hytrav/transform.hpp"
#include "hytrav/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace hytrav::synth {

/// amplitude * sin(2*pi/wavelength * (cos(dir) x + sin(dir) y) + phase)
struct Wave {
  double amplitude = 0.0;   ///< meters
  double wavelength = 1.0;  ///< meters
  double direction = 0.0;   ///< radians
  double phase = 0.0;       ///< radians
};

struct TerrainSpec {
  double base_height = 0.0;
  double gradient_x = 0.0;  ///< dz/dx of the underlying plane
  double gradient_y = 0.0;
  /// Seeded spectrum: octave i has amplitude * 0.5^i and wavelength * 0.5^i.
  double amplitude = 0.0;
  double wavelength = 4.0;
  int octaves = 0;
  std::vector<Wave> waves;  ///< added on top of the seeded spectrum
};

struct Rock {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.2;
  double z_offset = 0.0;  ///< sphere center relative to the terrain height at center
};

struct Region {
  TerrainClass cls = TerrainClass::Sand;
  std::vector<Eigen::Vector2d> polygon;  ///< world xy, any winding
};

struct TrajectoryPose {
  double stamp = 0.0;
  RigidTransform base_to_world;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  TerrainSpec terrain;
  std::vector<Rock> rocks;
  std::vector<Region> regions;
  std::vector<TrajectoryPose> trajectory;
  /// Waves shorter than this count as roughness in the ground-truth labels.
  double roughness_cutoff = 0.5;
  double max_range = 60.0;
  double label_confidence = 1.0;

  void validate() const;
};

SceneSpec scene_from_json(const nlohmann::json& j);

/// Materialized scene: spectrum drawn from the seed, rocks placed on the terrain.
class Scene {
 public:
  explicit Scene(const SceneSpec& spec);

  const SceneSpec& spec() const { return spec_; }
  const std::vector<Wave>& waves() const { return waves_; }

  double height(double x, double y) const;
  Eigen::Vector3d terrain_normal(double x, double y) const;
  /// Sum of waves shorter than the roughness cutoff.
  double fine_height(double x, double y) const;
  TerrainClass ground_class(double x, double y) const;
  Eigen::Vector3d rock_center(std::size_t i) const;
  /// Upper bound on |grad height|.
  double slope_bound() const { return slope_bound_; }

 private:
  SceneSpec spec_;
  std::vector<Wave> waves_;
  std::vector<double> rock_z_;
  double slope_bound_ = 0.0;
};

struct RenderedFrame {
  DepthFrame depth;
  LabelFrame classes;    ///< TerrainClass ids
  LabelFrame roughness;  ///< RoughnessClass ids from analytic residuals
  std::vector<double> true_residual;  ///< meters, NaN for misses
  std::vector<Eigen::Vector3d> hits;  ///< world-frame hit points, NaN for misses
};

/// Ray-casts every pixel (optical camera frame, depth along +z). Throws
/// std::invalid_argument when the camera sits below the terrain or inside a rock.
RenderedFrame render_frame(const Scene& scene, const RigidTransform& camera_to_world, const CameraIntrinsics& k,
                           double stamp = 0.0, const RoughnessBins& bins = {});

}  // namespace hytrav::synth

#pragma once

#include "hytrav/types.hpp"

#include <numbers>

namespace hytrav {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Thresholds of the piecewise slope cost. Angles in radians.
struct SlopeCostParams {
  double t_soft = deg2rad(30.0);
  double t = deg2rad(70.0);
  /// Map descending slopes to 2*pi - theta so the mirrored branches apply.
  bool signed_mode = false;

  void validate() const;
};

enum class Neighborhood { Knn, PixelGrid };

struct NormalParams {
  int k_neighbors = 30;
  Neighborhood mode = Neighborhood::Knn;
  int workers = 1;
};

/// Per-point surface normals aligned with the source cloud.
struct NormalField {
  std::vector<Eigen::Vector3d> normals;  ///< unit, n.z >= 0; NaN where invalid
  std::vector<double> slope;             ///< angle to +z in [0, pi/2]; NaN where invalid
  std::vector<std::uint8_t> valid;

  std::size_t size() const { return normals.size(); }
  std::size_t valid_count() const;
  /// Slope in [0, 2*pi): descending surfaces (normal leaning toward +x, the
  /// robot heading) map to 2*pi - slope.
  double signed_slope(std::size_t i) const;
};

/// Pinhole back-projection into the optical camera frame. Pixel order is kept.
PointCloud backproject(const DepthFrame& depth, const CameraIntrinsics& k);

/// Covariance (PCA) normals over each point's neighborhood, oriented toward
/// +z. The cloud must already be in a frame whose +z is vertical. Points whose
/// neighborhood covariance has no distinct smallest eigenvalue are invalid.
NormalField estimate_normals(const PointCloud& cloud, const NormalParams& params = {});

/// Piecewise slope cost, theta in [0, 2*pi].
double slope_cost(double theta, const SlopeCostParams& p = {});

/// Bins valid points with valid normals by (x, y); a cell holds the max cost
/// of its members. Cells without points are unknown.
CostGrid geometry_cost_grid(const PointCloud& cloud, const NormalField& normals,
                            const SlopeCostParams& p, const GridSpec& spec);

}  // namespace hytrav

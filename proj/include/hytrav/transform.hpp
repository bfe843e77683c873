#pragma once

#include "hytrav/types.hpp"

#include <Eigen/Core>

namespace hytrav {

/// SE(3) pose. Maps a point expressed in the source frame into the target
/// frame: p_target = rotation * p_source + translation.
class RigidTransform {
 public:
  RigidTransform() = default;
  /// Throws std::invalid_argument unless the rotation is orthonormal with
  /// determinant +1 (tolerance 1e-9).
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform translation_only(const Eigen::Vector3d& t);
  static RigidTransform rot_x(double angle_rad);
  static RigidTransform rot_y(double angle_rad);
  static RigidTransform rot_z(double angle_rad);
  /// Body-frame roll/pitch/yaw, applied as Rz(yaw) * Ry(pitch) * Rx(roll).
  static RigidTransform from_rpy(double roll, double pitch, double yaw,
                                 const Eigen::Vector3d& t = Eigen::Vector3d::Zero());

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }
  RigidTransform inverse() const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// Result applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

/// Re-expresses every valid point; ordering and mask are untouched.
PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud,
                           std::string target_frame = {});

/// Rotation taking optical-frame axes (x right, y down, z forward) to body
/// axes (x forward, y left, z up).
Eigen::Matrix3d optical_to_body();

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol);

}  // namespace hytrav

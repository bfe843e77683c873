#include "hytrav/transform.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace hytrav {

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw std::invalid_argument("RigidTransform: non-finite entries");
  }
  const double ortho_err = (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > 1e-9) throw std::invalid_argument("RigidTransform: rotation is not orthonormal");
  if (std::abs(rotation_.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("RigidTransform: rotation determinant is not +1");
  }
}

RigidTransform RigidTransform::translation_only(const Eigen::Vector3d& t) {
  return {Eigen::Matrix3d::Identity(), t};
}

RigidTransform RigidTransform::rot_x(double a) {
  return {Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix(), Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::rot_y(double a) {
  return {Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix(), Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::rot_z(double a) {
  return {Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix(), Eigen::Vector3d::Zero()};
}

RigidTransform RigidTransform::from_rpy(double roll, double pitch, double yaw, const Eigen::Vector3d& t) {
  const Eigen::Matrix3d r = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  return {r, t};
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation());
}

PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud, std::string target_frame) {
  std::vector<Eigen::Vector3d> pts(cloud.points());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (cloud.valid(i)) pts[i] = t.apply(pts[i]);
  }
  return PointCloud(cloud.width(), cloud.height(), std::move(pts), cloud.valid_mask(),
                    target_frame.empty() ? cloud.frame_id() : std::move(target_frame));
}

Eigen::Matrix3d optical_to_body() {
  Eigen::Matrix3d r;
  // columns: images of optical x, y, z in the body frame
  r << 0, 0, 1,
      -1, 0, 0,
      0, -1, 0;
  return r;
}

bool approx_equal(const RigidTransform& a, const RigidTransform& b, double tol) {
  return (a.rotation() - b.rotation()).cwiseAbs().maxCoeff() <= tol &&
         (a.translation() - b.translation()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace hytrav

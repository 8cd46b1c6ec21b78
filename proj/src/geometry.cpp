#include "vantage/geometry.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace vantage {

LandmarkCloud::LandmarkCloud(std::vector<Landmark> landmarks)
    : landmarks_(std::move(landmarks)) {
  if (landmarks_.empty())
    throw std::invalid_argument("landmark cloud must not be empty");
  std::unordered_set<int64_t> ids;
  ids.reserve(landmarks_.size());
  aabb_.min = landmarks_.front().position;
  aabb_.max = landmarks_.front().position;
  for (const auto& lm : landmarks_) {
    if (!lm.position.allFinite())
      throw std::invalid_argument("landmark position must be finite");
    if (!ids.insert(lm.id).second)
      throw std::invalid_argument("duplicate landmark id " + std::to_string(lm.id));
    aabb_.expand(lm.position);
  }
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite())
    throw std::invalid_argument("pose entries must be finite");
  double ortho = (rotation.transpose() * rotation - Mat3::Identity()).norm();
  if (ortho > 1e-9)
    throw std::invalid_argument("rotation is not orthonormal (|R^T R - I| = " +
                                std::to_string(ortho) + ")");
  if (std::abs(rotation.determinant() - 1.0) > 1e-9)
    throw std::invalid_argument("rotation determinant is not +1");
}

void PinholeCamera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw std::invalid_argument("focal lengths must be positive");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("image size must be positive");
  if (!(near > 0.0) || !(far > near))
    throw std::invalid_argument("require 0 < near < far");
}

std::optional<Vec2> project(const PinholeCamera& camera, const Vec3& point_cam) {
  double z = point_cam.z();
  if (!(z >= camera.near && z <= camera.far)) return std::nullopt;
  Vec2 px(camera.fx * point_cam.x() / z + camera.cx,
          camera.fy * point_cam.y() / z + camera.cy);
  if (!camera.in_image(px)) return std::nullopt;
  return px;
}

Vec2 project_unchecked(const PinholeCamera& camera, const Vec3& point_cam) {
  double z = point_cam.z();
  return {camera.fx * point_cam.x() / z + camera.cx,
          camera.fy * point_cam.y() / z + camera.cy};
}

Vec3 transform_into_camera(const Pose& pose, const Vec3& world_point) {
  return pose.world_to_camera(world_point);
}

double rotation_angle(const Mat3& a, const Mat3& b) {
  double c = ((a.transpose() * b).trace() - 1.0) * 0.5;
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

PoseError pose_error(const Pose& a, const Pose& b) {
  PoseError err;
  err.translation_m = (a.translation() - b.translation()).norm();
  err.rotation_deg = rotation_angle(a.rotation(), b.rotation()) * 180.0 / M_PI;
  return err;
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle_rad) {
  Vec3 u = axis.normalized();
  double c = std::cos(angle_rad), s = std::sin(angle_rad), v = 1.0 - c;
  Mat3 r;
  r << c + u.x() * u.x() * v, u.x() * u.y() * v - u.z() * s, u.x() * u.z() * v + u.y() * s,
      u.y() * u.x() * v + u.z() * s, c + u.y() * u.y() * v, u.y() * u.z() * v - u.x() * s,
      u.z() * u.x() * v - u.y() * s, u.z() * u.y() * v + u.x() * s, c + u.z() * u.z() * v;
  return r;
}

Mat3 rotation_x(double a) { return axis_angle_rotation(Vec3::UnitX(), a); }
Mat3 rotation_y(double a) { return axis_angle_rotation(Vec3::UnitY(), a); }
Mat3 rotation_z(double a) { return axis_angle_rotation(Vec3::UnitZ(), a); }

}  // namespace vantage

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace vantage {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// One sparse-map point, world frame, meters.
struct Landmark {
  int64_t id = 0;
  Vec3 position = Vec3::Zero();
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  Aabb inflated(double margin) const { return {min.array() - margin, max.array() + margin}; }
};

/// The sparse map: landmark list plus its bounding box. Immutable once built.
class LandmarkCloud {
 public:
  LandmarkCloud() = default;
  // Throws std::invalid_argument on an empty list, duplicate ids, or
  // non-finite coordinates.
  explicit LandmarkCloud(std::vector<Landmark> landmarks);

  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  const Aabb& aabb() const { return aabb_; }
  size_t size() const { return landmarks_.size(); }
  bool empty() const { return landmarks_.empty(); }
  const Landmark& operator[](size_t i) const { return landmarks_[i]; }

 private:
  std::vector<Landmark> landmarks_;
  Aabb aabb_;
};

/// Rigid camera pose: `rotation` maps camera-frame vectors into the world,
/// `translation` is the camera center in world coordinates. Validated as
/// special orthogonal on construction.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  // Throws std::invalid_argument unless R is special orthogonal within 1e-9
  // and t is finite.
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return Pose(); }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  /// World point expressed in this camera's frame: R^T (p - t).
  Vec3 world_to_camera(const Vec3& world_point) const {
    return rotation_.transpose() * (world_point - translation_);
  }
  /// Camera-frame point expressed in the world: R p + t.
  Vec3 camera_to_world(const Vec3& cam_point) const {
    return rotation_ * cam_point + translation_;
  }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

struct PoseError {
  double translation_m = 0.0;
  double rotation_deg = 0.0;
};

/// Pinhole intrinsics with a depth clip range. Camera frame: z forward,
/// x right, y down. Pixel origin at the top-left corner.
struct PinholeCamera {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;
  double near = 0, far = 0;

  // Throws std::invalid_argument if any invariant fails.
  void validate() const;

  bool in_image(const Vec2& px) const {
    return px.x() >= 0.0 && px.x() < width && px.y() >= 0.0 && px.y() < height;
  }
};

/// Pinhole projection of a camera-frame point. Absent when the point falls
/// outside the [near, far] depth range or outside the image bounds.
std::optional<Vec2> project(const PinholeCamera& camera, const Vec3& point_cam);

/// Projection without the frustum test; z must be positive. Used where the
/// caller wants raw reprojection error for an arbitrary point.
Vec2 project_unchecked(const PinholeCamera& camera, const Vec3& point_cam);

/// World point into the camera frame of `pose`: R^T (p - t).
Vec3 transform_into_camera(const Pose& pose, const Vec3& world_point);

/// Euclidean translation gap and geodesic rotation angle (degrees).
PoseError pose_error(const Pose& a, const Pose& b);

/// Rotation about a unit axis by angle (radians).
Mat3 axis_angle_rotation(const Vec3& axis, double angle_rad);

Mat3 rotation_x(double angle_rad);
Mat3 rotation_y(double angle_rad);
Mat3 rotation_z(double angle_rad);

/// Geodesic angle between two rotations, radians.
double rotation_angle(const Mat3& a, const Mat3& b);

}  // namespace vantage

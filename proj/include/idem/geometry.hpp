#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace idem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// An ordered, non-empty set of finite 3D points. Coordinates keep the units of
/// their source file; nothing in the library converts them.
///
/// Point order is part of the value: per-point results (entropy profiles,
/// q vectors) are indexed the same way as `points()`.
class PointCloud {
 public:
  /// Throws ValidationError when `points` is empty or holds a non-finite coordinate.
  explicit PointCloud(std::vector<Vec3> points, std::string label = {});

  std::span<const Vec3> points() const noexcept { return points_; }
  const Vec3& operator[](std::size_t i) const noexcept { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::string& label() const noexcept { return label_; }

  PointCloud with_label(std::string label) const;

  bool operator==(const PointCloud& other) const noexcept { return points_ == other.points_; }

 private:
  std::vector<Vec3> points_;
  std::string label_;
};

/// x' = R x + t with R a proper rotation.
class RigidTransform {
 public:
  /// Orthonormality tolerance on the entries of RᵀR − I (and on det R − 1).
  static constexpr double kOrthonormalTolerance = 1e-9;

  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  /// Throws ValidationError unless `rotation` is orthonormal with determinant +1.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  /// Builds from a homogeneous 4×4 matrix; the last row must be (0, 0, 0, 1).
  static RigidTransform from_matrix(const Mat4& m);

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }
  Mat4 matrix() const;

  Vec3 operator()(const Vec3& x) const { return rotation_ * x + translation_; }

  /// (a * b)(x) = a(b(x)).
  friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);
  RigidTransform inverse() const;

  /// Rotation angle of R in degrees, in [0, 180].
  double rotation_angle_deg() const;

  bool is_close(const RigidTransform& other, double tol) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

/// Point i of the result is t(cloud[i]); count, order and label are kept.
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

/// Arithmetic mean of the points.
Vec3 centroid(std::span<const Vec3> points);
inline Vec3 centroid(const PointCloud& cloud) { return centroid(cloud.points()); }

/// Rotation by `angle_deg` about `axis` (unit norm within 1e-9, ValidationError otherwise).
Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg);

/// Intrinsic X-Y'-Z'' rotation: R = Rx(rx) · Ry(ry) · Rz(rz), angles in degrees.
Mat3 euler_xyz_rotation(double rx_deg, double ry_deg, double rz_deg);

/// The transform x ↦ R (x − center) + center.
RigidTransform rotation_about_point(const Vec3& center, const Mat3& rotation);

/// Rotation of the cloud about its own centroid; the centroid is a fixed point.
RigidTransform rotation_about_centroid(const PointCloud& cloud, const Vec3& axis, double angle_deg);

/// Largest pairwise distance (exact, O(n²)).
double diameter(std::span<const Vec3> points);

struct BoundingBox {
  Vec3 min;
  Vec3 max;
};
BoundingBox bounding_box(std::span<const Vec3> points);

}  // namespace idem

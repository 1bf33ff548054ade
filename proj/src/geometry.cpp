#include "idem/geometry.hpp"

#include "idem/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace idem {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

PointCloud::PointCloud(std::vector<Vec3> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  if (points_.empty()) {
    throw ValidationError("point cloud must contain at least one point");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw ValidationError("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::with_label(std::string label) const {
  PointCloud copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw ValidationError("rigid transform has non-finite entries");
  }
  const Mat3 residual = rotation_.transpose() * rotation_ - Mat3::Identity();
  if (residual.cwiseAbs().maxCoeff() > kOrthonormalTolerance ||
      std::abs(rotation_.determinant() - 1.0) > kOrthonormalTolerance) {
    throw ValidationError("rotation is not orthonormal with determinant +1");
  }
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw ValidationError("homogeneous matrix must have last row (0, 0, 0, 1)");
  }
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation_ = a.rotation_ * b.rotation_;
  out.translation_ = a.rotation_ * b.translation_ + a.translation_;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

double RigidTransform::rotation_angle_deg() const {
  const double c = std::clamp((rotation_.trace() - 1.0) / 2.0, -1.0, 1.0);
  // acos loses precision near 0; use the skew part there.
  const Vec3 skew(rotation_(2, 1) - rotation_(1, 2), rotation_(0, 2) - rotation_(2, 0),
                  rotation_(1, 0) - rotation_(0, 1));
  return std::atan2(0.5 * skew.norm(), c) / kDegToRad;
}

bool RigidTransform::is_close(const RigidTransform& other, double tol) const {
  return (rotation_ - other.rotation_).cwiseAbs().maxCoeff() <= tol &&
         (translation_ - other.translation_).cwiseAbs().maxCoeff() <= tol;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) {
    out.push_back(t(p));
  }
  return PointCloud(std::move(out), cloud.label());
}

Vec3 centroid(std::span<const Vec3> points) {
  if (points.empty()) {
    throw ValidationError("centroid of an empty point set");
  }
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points) {
    sum += p;
  }
  return sum / static_cast<double>(points.size());
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle_deg) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9) {
    throw ValidationError("rotation axis must have unit norm");
  }
  if (!std::isfinite(angle_deg)) {
    throw ValidationError("rotation angle must be finite");
  }
  return Eigen::AngleAxisd(angle_deg * kDegToRad, axis).toRotationMatrix();
}

Mat3 euler_xyz_rotation(double rx_deg, double ry_deg, double rz_deg) {
  return (Eigen::AngleAxisd(rx_deg * kDegToRad, Vec3::UnitX()) *
          Eigen::AngleAxisd(ry_deg * kDegToRad, Vec3::UnitY()) *
          Eigen::AngleAxisd(rz_deg * kDegToRad, Vec3::UnitZ()))
      .toRotationMatrix();
}

RigidTransform rotation_about_point(const Vec3& center, const Mat3& rotation) {
  return RigidTransform(rotation, center - rotation * center);
}

RigidTransform rotation_about_centroid(const PointCloud& cloud, const Vec3& axis, double angle_deg) {
  return rotation_about_point(centroid(cloud), axis_angle_rotation(axis, angle_deg));
}

double diameter(std::span<const Vec3> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, (points[i] - points[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

BoundingBox bounding_box(std::span<const Vec3> points) {
  if (points.empty()) {
    throw ValidationError("bounding box of an empty point set");
  }
  BoundingBox box{points[0], points[0]};
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

}  // namespace idem

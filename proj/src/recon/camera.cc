#include "twinlight/recon/camera.h"

#include <cmath>

#include <Eigen/Geometry>

#include "twinlight/common/image.h"

namespace twinlight {

RigidTransform RigidTransform::Inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

RigidTransform RigidTransform::FromQuaternion(double qw, double qx, double qy, double qz,
                                              const Vec3& translation) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  Require(std::isfinite(q.norm()) && q.norm() > 1e-12, "quaternion must be non-zero");
  q.normalize();
  RigidTransform t;
  t.rotation = q.toRotationMatrix();
  t.translation = translation;
  return t;
}

Eigen::Quaterniond RigidTransform::Quaternion() const {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;
  return q;
}

void ValidateRigidTransform(const RigidTransform& t) {
  Require(t.rotation.allFinite() && t.translation.allFinite(), "transform must be finite");
  const double err = (t.rotation.transpose() * t.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  Require(err <= 1e-6, "rotation is not orthonormal within 1e-6");
  Require(t.rotation.determinant() > 0.0, "rotation must have determinant +1");
}

Eigen::Matrix3d CameraModel::Intrinsics() const {
  Eigen::Matrix3d k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

Eigen::Matrix<double, 3, 4> CameraModel::ProjectionMatrix() const {
  const RigidTransform view = pose.Inverse();
  Eigen::Matrix<double, 3, 4> rt;
  rt.leftCols<3>() = view.rotation;
  rt.col(3) = view.translation;
  return Intrinsics() * rt;
}

Vec3 CameraModel::Direction(double u, double v) const {
  const Vec3 d((u - cx) / fx, (v - cy) / fy, 1.0);
  return (pose.rotation * d).normalized();
}

Ray CameraModel::PixelRay(int x, int y) const {
  Ray r;
  r.origin = pose.translation;
  r.direction = Direction(x + 0.5, y + 0.5);
  return r;
}

std::optional<CameraModel::Projection> CameraModel::Project(const Vec3& world) const {
  const Vec3 c = pose.rotation.transpose() * (world - pose.translation);
  if (!(c.z() > 0.0)) return std::nullopt;
  return Projection{fx * c.x() / c.z() + cx, fy * c.y() / c.z() + cy, c.z()};
}

void ValidateCamera(const CameraModel& camera) {
  Require(camera.width > 0 && camera.height > 0, "camera size must be positive");
  Require(camera.fx > 0 && camera.fy > 0 && std::isfinite(camera.fx) && std::isfinite(camera.fy),
          "camera focal lengths must be > 0");
  Require(std::isfinite(camera.cx) && std::isfinite(camera.cy), "camera centre must be finite");
  ValidateRigidTransform(camera.pose);
}

RigidTransform LookAt(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) right = forward.cross(std::abs(forward.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY());
  right.normalize();
  const Vec3 down = forward.cross(right);
  RigidTransform t;
  t.rotation.col(0) = right;
  t.rotation.col(1) = down;
  t.rotation.col(2) = forward;
  t.translation = eye;
  return t;
}

CameraModel MakeCamera(int width, int height, double hfov, const RigidTransform& pose) {
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = 0.5 * width / std::tan(0.5 * hfov);
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.pose = pose;
  return cam;
}

}  // namespace twinlight

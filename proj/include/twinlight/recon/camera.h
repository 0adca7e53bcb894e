#ifndef TWINLIGHT_RECON_CAMERA_H_
#define TWINLIGHT_RECON_CAMERA_H_

#include <optional>

#include <Eigen/Core>

#include "twinlight/common/vec.h"
#include "twinlight/geometry/bvh.h"

namespace twinlight {

// Rigid transform x' = rotation * x + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 Apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 ApplyDirection(const Vec3& d) const { return rotation * d; }
  RigidTransform Inverse() const;
  RigidTransform operator*(const RigidTransform& rhs) const;

  // Unit quaternion (w, x, y, z), normalised on input.
  static RigidTransform FromQuaternion(double qw, double qx, double qy, double qz,
                                       const Vec3& translation);
  Eigen::Quaterniond Quaternion() const;
  bool operator==(const RigidTransform&) const = default;
};

// Throws PreconditionError unless the rotation is orthonormal within 1e-6
// with determinant +1 and the translation is finite.
void ValidateRigidTransform(const RigidTransform& t);

// Pinhole camera, computer-vision axes: +x right, +y down, +z forward.
// `pose` maps camera coordinates to world coordinates. Pixel (x, y) spans
// [x, x+1) x [y, y+1); its centre is (x + 0.5, y + 0.5).
struct CameraModel {
  int width = 0;
  int height = 0;
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  RigidTransform pose;

  Vec3 Center() const { return pose.translation; }
  Eigen::Matrix3d Intrinsics() const;
  // P = K [R^T | -R^T t], mapping homogeneous world points to pixels.
  Eigen::Matrix<double, 3, 4> ProjectionMatrix() const;

  // Unit world-space direction through continuous pixel coordinate (u, v).
  Vec3 Direction(double u, double v) const;
  Ray PixelRay(int x, int y) const;

  struct Projection {
    double u;
    double v;
    double z;  // camera-space depth along +z
  };
  // Empty when the point is not in front of the camera (z <= 0).
  std::optional<Projection> Project(const Vec3& world) const;

  bool operator==(const CameraModel&) const = default;
};

// fx, fy > 0, positive size, finite centre and a valid pose.
void ValidateCamera(const CameraModel& camera);

// Camera at `eye` looking at `target`; image "up" follows `up` where possible.
RigidTransform LookAt(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

// Square-pixel camera with a horizontal field of view in radians.
CameraModel MakeCamera(int width, int height, double hfov, const RigidTransform& pose);

}  // namespace twinlight

#endif  // TWINLIGHT_RECON_CAMERA_H_

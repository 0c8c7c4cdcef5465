#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "tlp/geometry.hpp"
#include "tlp/rng.hpp"

namespace tlp::testing {

inline Eigen::Matrix3d random_rotation(Rng& rng) {
  // Uniform-ish rotation from a random quaternion; exactness is irrelevant
  // for the properties tested, orthonormality is what matters.
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) q[i] = rng.uniform(-1.0, 1.0);
  while (q.norm() < 1e-3) {
    for (int i = 0; i < 4; ++i) q[i] = rng.uniform(-1.0, 1.0);
  }
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

inline CameraModel random_camera(Rng& rng) {
  CameraModel cam;
  cam.id = CameraId::front_medium;
  cam.width = 1920;
  cam.height = 1200;
  cam.fx = rng.uniform(500.0, 4000.0);
  cam.fy = rng.uniform(500.0, 4000.0);
  cam.cx = rng.uniform(0.25, 0.75) * cam.width;
  cam.cy = rng.uniform(0.25, 0.75) * cam.height;
  cam.rotation = random_rotation(rng);
  cam.origin = Eigen::Vector3d(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                               rng.uniform(-5.0, 5.0));
  return cam;
}

/// Intrinsics derived from a field of view and a resolution.
inline CameraModel camera_from_fov(CameraId id, double fov_h_deg, double fov_v_deg, double width,
                                   double height, const Eigen::Vector3d& mount_origin = {0, 0, 0}) {
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  CameraModel cam;
  cam.id = id;
  cam.width = width;
  cam.height = height;
  cam.fx = (width / 2.0) / std::tan(fov_h_deg * kDegToRad / 2.0);
  cam.fy = (height / 2.0) / std::tan(fov_v_deg * kDegToRad / 2.0);
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;
  cam.rotation = forward_mount_rotation();
  cam.origin = mount_origin;
  return cam;
}

inline CameraModel front_medium_camera(const Eigen::Vector3d& mount_origin = {0, 0, 1.6}) {
  return camera_from_fov(CameraId::front_medium, 61.0, 39.0, 1920, 1200, mount_origin);
}

inline CameraModel front_tele_camera(const Eigen::Vector3d& mount_origin = {0, 0, 1.6}) {
  return camera_from_fov(CameraId::front_tele, 31.0, 20.0, 1920, 1200, mount_origin);
}

inline CameraModel front_wide_camera(const Eigen::Vector3d& mount_origin = {0, 0, 1.6}) {
  return camera_from_fov(CameraId::front_wide, 106.0, 92.0, 2592, 2048, mount_origin);
}

}  // namespace tlp::testing

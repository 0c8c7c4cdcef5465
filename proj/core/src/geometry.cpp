#include "tlp/geometry.hpp"

#include <cmath>
#include <sstream>

#include "tlp/errors.hpp"

namespace tlp {

namespace {

constexpr double kOrthonormalTol = 1e-9;

}  // namespace

std::string to_string(CameraId id) {
  switch (id) {
    case CameraId::front_medium: return "front_medium";
    case CameraId::front_tele: return "front_tele";
    case CameraId::front_wide: return "front_wide";
  }
  throw ValidationError("invalid camera id value");
}

CameraId camera_id_from_string(std::string_view s) {
  if (s == "front_medium") return CameraId::front_medium;
  if (s == "front_tele") return CameraId::front_tele;
  if (s == "front_wide") return CameraId::front_wide;
  throw ParseError("unknown camera id '" + std::string(s) +
                   "' (expected front_medium|front_tele|front_wide)");
}

void validate_camera(const CameraModel& camera) {
  std::ostringstream problems;
  if (!(camera.fx > 0.0) || !(camera.fy > 0.0)) {
    problems << "focal lengths must be positive (fx=" << camera.fx << ", fy=" << camera.fy
             << "); ";
  }
  if (!(camera.width > 0.0) || !(camera.height > 0.0)) {
    problems << "resolution must be positive (" << camera.width << "x" << camera.height << "); ";
  }
  if (!(camera.cx >= 0.0 && camera.cx < camera.width) ||
      !(camera.cy >= 0.0 && camera.cy < camera.height)) {
    problems << "principal point (" << camera.cx << ", " << camera.cy
             << ") outside the frame; ";
  }
  const Eigen::Matrix3d gram = camera.rotation.transpose() * camera.rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kOrthonormalTol) {
    problems << "rotation is not orthonormal; ";
  } else if (std::abs(camera.rotation.determinant() - 1.0) > kOrthonormalTol) {
    problems << "rotation determinant is not +1; ";
  }
  const std::string text = problems.str();
  if (!text.empty()) {
    throw ValidationError("camera '" + to_string(camera.id) + "': " + text);
  }
}

Ray pixel_ray(const CameraModel& camera, const Eigen::Vector2d& pixel) {
  const double x = pixel.x();
  const double y = pixel.y();
  if (!(x >= 0.0 && x < camera.width && y >= 0.0 && y < camera.height)) {
    std::ostringstream msg;
    msg << "pixel (" << x << ", " << y << ") outside frame [0, " << camera.width << ") x [0, "
        << camera.height << ") of camera '" << to_string(camera.id) << "'";
    throw ValidationError(msg.str());
  }
  const Eigen::Vector3d camera_dir((x - camera.cx) / camera.fx, (y - camera.cy) / camera.fy, 1.0);
  return Ray{camera.origin, camera.rotation * camera_dir.normalized()};
}

double ray_point_distance(const Ray& ray, const Eigen::Vector3d& point) {
  const Eigen::Vector3d delta = point - ray.origin;
  const double t = std::max(0.0, delta.dot(ray.direction));
  return (delta - t * ray.direction).norm();
}

std::optional<PixelProjection> project_point(const CameraModel& camera,
                                             const Eigen::Vector3d& world_point) {
  const Eigen::Vector3d in_camera = camera.rotation.transpose() * (world_point - camera.origin);
  if (!(in_camera.z() > 0.0)) return std::nullopt;
  const double px = camera.fx * in_camera.x() / in_camera.z() + camera.cx;
  const double py = camera.fy * in_camera.y() / in_camera.z() + camera.cy;
  if (!(px >= 0.0 && px < camera.width && py >= 0.0 && py < camera.height)) return std::nullopt;
  return PixelProjection{Eigen::Vector2d(px, py), in_camera.z()};
}

Eigen::Matrix3d ego_rotation(const Eigen::Vector3d& heading) {
  const double norm = heading.norm();
  if (!(norm > 0.0)) throw ValidationError("ego heading must be non-zero");
  const Eigen::Vector3d forward = heading / norm;
  Eigen::Vector3d left = Eigen::Vector3d::UnitZ().cross(forward);
  const double left_norm = left.norm();
  if (left_norm < 1e-9) {
    throw ValidationError("ego heading is parallel to the world z axis");
  }
  left /= left_norm;
  const Eigen::Vector3d up = forward.cross(left);
  Eigen::Matrix3d rot;
  rot.col(0) = forward;
  rot.col(1) = left;
  rot.col(2) = up;
  return rot;
}

Eigen::Matrix3d forward_mount_rotation() {
  // camera x -> ego -y, camera y -> ego -z, camera z -> ego x
  Eigen::Matrix3d rot;
  rot.col(0) = Eigen::Vector3d(0, -1, 0);
  rot.col(1) = Eigen::Vector3d(0, 0, -1);
  rot.col(2) = Eigen::Vector3d(1, 0, 0);
  return rot;
}

CameraModel camera_in_world(const CameraModel& mount, const Eigen::Vector3d& position,
                            const Eigen::Vector3d& heading) {
  const Eigen::Matrix3d ego = ego_rotation(heading);
  CameraModel world = mount;
  world.rotation = ego * mount.rotation;
  world.origin = position + ego * mount.origin;
  return world;
}

}  // namespace tlp

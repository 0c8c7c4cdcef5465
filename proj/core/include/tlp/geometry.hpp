#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace tlp {

enum class CameraId {
  front_medium,
  front_tele,
  front_wide,
};

std::string to_string(CameraId id);
CameraId camera_id_from_string(std::string_view s);

/// Pinhole camera. The camera frame is x-right, y-down, z-forward;
/// `rotation` maps camera coordinates to the surrounding frame and `origin`
/// is the optical center in that frame. A CameraModel is used both for
/// world-frame poses (association, projection) and for mounting poses in the
/// ego frame (scenario files); see camera_in_world().
struct CameraModel {
  CameraId id = CameraId::front_medium;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double width = 0.0;
  double height = 0.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
};

/// Throws ValidationError unless fx, fy > 0, the principal point lies inside
/// the frame, and `rotation` is a proper rotation (R^T R = I and det R = +1,
/// both to 1e-9).
void validate_camera(const CameraModel& camera);

/// Half-line in world coordinates; `direction` is unit length.
struct Ray {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
};

/// Casts the ray through an image pixel: direction is the normalized
/// [(x-cx)/fx, (y-cy)/fy, 1] rotated into the camera's parent frame, origin
/// is the optical center. Pixels outside [0,width) x [0,height) are rejected
/// with a ValidationError naming the pixel and the bounds.
Ray pixel_ray(const CameraModel& camera, const Eigen::Vector2d& pixel);

/// Distance from `point` to the forward half of the ray: min over t >= 0 of
/// |origin + t*direction - point|. The clamp means points behind the origin
/// measure their distance to the origin itself, so map lights behind the
/// camera can never look close to a forward detection.
double ray_point_distance(const Ray& ray, const Eigen::Vector3d& point);

struct PixelProjection {
  Eigen::Vector2d pixel;
  double depth = 0.0;  // z in the camera frame, meters
};

/// Projects a world point into the image. Empty result when the point lies at
/// or behind the image plane or the pixel falls outside the frame.
std::optional<PixelProjection> project_point(const CameraModel& camera,
                                             const Eigen::Vector3d& world_point);

/// Rotation taking ego coordinates (x forward, y left, z up) to world
/// coordinates for a given heading. Throws if heading is (anti)parallel to
/// the world z axis.
Eigen::Matrix3d ego_rotation(const Eigen::Vector3d& heading);

/// Camera->ego rotation of a forward-looking camera.
Eigen::Matrix3d forward_mount_rotation();

/// World-frame camera for a mounting pose carried by an ego vehicle at
/// `position` looking along `heading`.
CameraModel camera_in_world(const CameraModel& mount, const Eigen::Vector3d& position,
                            const Eigen::Vector3d& heading);

}  // namespace tlp

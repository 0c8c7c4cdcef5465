#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tlp/association.hpp"
#include "tlp/geometry.hpp"
#include "tlp/hdmap.hpp"
#include "tlp/noise.hpp"

namespace tlp {

struct EgoPose {
  std::int64_t timestamp_ns = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d heading = Eigen::Vector3d::UnitX();  // unit length
  double speed_mps = 0.0;
};

/// The front-medium stream always runs; the second detector instance flips
/// between tele (far) and wide (near) with the distance to the intersection.
struct StreamSchedule {
  CameraId primary = CameraId::front_medium;
  CameraId secondary = CameraId::front_tele;
};

/// front_wide within switch_distance of the stop line, front_tele otherwise.
/// Pass +infinity when no intersection is upcoming. The boundary is strict:
/// exactly switch_distance still selects front_tele.
CameraId select_second_stream(double distance_to_stop_line_m, double switch_distance_m = 10.0);

/// Detection log, newline-delimited JSON, one record per line:
/// {"t": ns, "camera": "front_medium|front_tele|front_wide",
///  "bbox": [x1,y1,x2,y2], "class": "<state>_<pictogram>"|"off", "conf": f}
/// Returns detections sorted by timestamp (stable, so per-camera order is
/// preserved). Malformed records and per-camera timestamp regressions are
/// reported with their line number.
std::vector<Detection> load_detection_log(const std::filesystem::path& path);
std::vector<Detection> parse_detection_log(std::istream& in, std::string_view source_name);

struct PhaseInterval {
  std::int64_t from_ns = 0;
  std::int64_t to_ns = 0;  // half-open [from, to); the final interval is closed
  SignalState state = SignalState::red;
};

struct PhaseSchedule {
  std::string group_id;
  std::vector<PhaseInterval> intervals;  // contiguous, covering the trajectory span
};

struct RelevantInterval {
  std::int64_t from_ns = 0;
  std::int64_t to_ns = 0;
  std::string group_id;
};

/// A closed scenario: map, camera mounting poses, scripted ego trajectory,
/// ground-truth phase schedule per signal group, relevant-group timeline and
/// noise model. Everything the simulator needs to run without a vehicle.
struct Scenario {
  HdMap map;
  std::vector<CameraModel> cameras;  // mounting poses in the ego frame
  std::vector<EgoPose> trajectory;   // strictly increasing timestamps
  std::vector<PhaseSchedule> phases;
  std::vector<RelevantInterval> relevant;
  NoiseModel noise;

  std::int64_t start_ns() const { return trajectory.front().timestamp_ns; }
  std::int64_t end_ns() const { return trajectory.back().timestamp_ns; }

  const CameraModel* camera(CameraId id) const;

  /// Scheduled state of a group at time t; throws ValidationError outside the
  /// scheduled span.
  SignalState state_at(std::string_view group_id, std::int64_t t_ns) const;

  /// Ground-truth change points of a group's schedule within (lo, hi].
  std::vector<std::int64_t> state_changes(std::string_view group_id, std::int64_t lo_ns,
                                          std::int64_t hi_ns) const;

  std::optional<std::string> relevant_group_at(std::int64_t t_ns) const;

  /// Linear interpolation along the trajectory, clamped at both ends; the
  /// heading is re-normalized after interpolation.
  EgoPose pose_at(std::int64_t t_ns) const;
};

/// Loads and fully validates a scenario. The map may be given inline under
/// "map" or as {"map": "relative/path.json"} resolved against the scenario
/// file's directory.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view text, std::string_view source_name,
                        const std::filesystem::path& base_dir);

/// Cameras embedded in a map or scenario document ("cameras" array); used by
/// the single-frame association tool.
std::vector<CameraModel> load_cameras(const std::filesystem::path& path);

}  // namespace tlp

#include "tlp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json_util.hpp"
#include "tlp/errors.hpp"

namespace tlp {

using jsonu::json;

CameraId select_second_stream(double distance_to_stop_line_m, double switch_distance_m) {
  if (distance_to_stop_line_m < 0.0) {
    throw ValidationError("distance to stop line must be non-negative");
  }
  return distance_to_stop_line_m < switch_distance_m ? CameraId::front_wide
                                                     : CameraId::front_tele;
}

namespace {

Detection detection_from_json(const json& j, const std::string& ctx) {
  Detection det;
  det.timestamp_ns = jsonu::require_int(j, "t", ctx);
  det.camera_id = camera_id_from_string(jsonu::require_string(j, "camera", ctx));
  const json& bbox = jsonu::require(j, "bbox", ctx);
  if (!bbox.is_array() || bbox.size() != 4) {
    throw ParseError(ctx + ": field 'bbox' must be an array of 4 numbers");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (!bbox[i].is_number()) throw ParseError(ctx + ": bbox entries must be numbers");
    det.bbox[i] = bbox[i].get<double>();
  }
  det.cls = light_class_from_string(jsonu::require_string(j, "class", ctx));
  det.confidence = jsonu::require_double(j, "conf", ctx);
  try {
    validate_detection(det);
  } catch (const ValidationError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  return det;
}

}  // namespace

std::vector<Detection> parse_detection_log(std::istream& in, std::string_view source_name) {
  std::vector<Detection> detections;
  std::map<CameraId, std::int64_t> last_ns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = std::string(source_name) + ":" + std::to_string(line_no);
    const json j = jsonu::parse_text(line, ctx);
    Detection det = detection_from_json(j, ctx);
    const auto it = last_ns.find(det.camera_id);
    if (it != last_ns.end() && det.timestamp_ns < it->second) {
      throw ParseError(ctx + ": timestamps of camera '" + to_string(det.camera_id) +
                       "' go backwards");
    }
    last_ns[det.camera_id] = det.timestamp_ns;
    detections.push_back(det);
  }
  std::stable_sort(detections.begin(), detections.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.timestamp_ns < b.timestamp_ns;
                   });
  return detections;
}

std::vector<Detection> load_detection_log(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw IoError("file not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_detection_log(in, path.string());
}

namespace {

CameraModel camera_from_json(const json& j, const std::string& ctx) {
  CameraModel cam;
  cam.id = camera_id_from_string(jsonu::require_string(j, "id", ctx));
  cam.fx = jsonu::require_double(j, "fx", ctx);
  cam.fy = jsonu::require_double(j, "fy", ctx);
  cam.cx = jsonu::require_double(j, "cx", ctx);
  cam.cy = jsonu::require_double(j, "cy", ctx);
  cam.width = jsonu::require_double(j, "width", ctx);
  cam.height = jsonu::require_double(j, "height", ctx);
  if (j.contains("rotation")) {
    const json& rot = j.at("rotation");
    if (!rot.is_array() || rot.size() != 3) {
      throw ParseError(ctx + ": 'rotation' must be a 3x3 array");
    }
    for (int r = 0; r < 3; ++r) {
      if (!rot[r].is_array() || rot[r].size() != 3) {
        throw ParseError(ctx + ": 'rotation' must be a 3x3 array");
      }
      for (int c = 0; c < 3; ++c) {
        if (!rot[r][c].is_number()) throw ParseError(ctx + ": rotation entries must be numbers");
        cam.rotation(r, c) = rot[r][c].get<double>();
      }
    }
  } else {
    cam.rotation = forward_mount_rotation();
  }
  if (j.contains("origin")) {
    cam.origin = jsonu::as_vec3(j.at("origin"), ctx + ": field 'origin'");
  }
  try {
    validate_camera(cam);
  } catch (const ValidationError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  return cam;
}

std::vector<CameraModel> cameras_from_json(const json& doc, const std::string& ctx) {
  std::vector<CameraModel> cameras;
  if (!doc.is_array()) throw ParseError(ctx + ": 'cameras' must be an array");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    cameras.push_back(camera_from_json(doc[i], ctx + ": cameras[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    for (std::size_t k = i + 1; k < cameras.size(); ++k) {
      if (cameras[i].id == cameras[k].id) {
        throw ParseError(ctx + ": duplicate camera '" + to_string(cameras[i].id) + "'");
      }
    }
  }
  return cameras;
}

EgoPose pose_from_json(const json& j, const std::string& ctx) {
  EgoPose pose;
  pose.timestamp_ns = jsonu::require_int(j, "t", ctx);
  pose.position = jsonu::require_vec3(j, "position", ctx);
  const bool has_heading = j.contains("heading");
  const bool has_yaw = j.contains("yaw");
  if (has_heading == has_yaw) {
    throw ParseError(ctx + ": exactly one of 'heading' or 'yaw' is required");
  }
  if (has_yaw) {
    if (!j.at("yaw").is_number()) throw ParseError(ctx + ": 'yaw' must be a number");
    const double yaw = j.at("yaw").get<double>();
    pose.heading = Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
  } else {
    pose.heading = jsonu::as_vec3(j.at("heading"), ctx + ": field 'heading'");
    const double norm = pose.heading.norm();
    if (!(norm > 1e-12)) throw ParseError(ctx + ": 'heading' must be non-zero");
    pose.heading /= norm;
  }
  pose.speed_mps = j.contains("speed") ? jsonu::require_double(j, "speed", ctx) : 0.0;
  if (pose.speed_mps < 0.0) throw ParseError(ctx + ": 'speed' must be non-negative");
  return pose;
}

NoiseModel noise_from_json(const json& j, const std::string& ctx) {
  NoiseModel noise;
  if (j.is_null()) return noise;
  if (!j.is_object()) throw ParseError(ctx + ": 'noise' must be an object");
  if (j.contains("miss_rate")) noise.miss_rate = j.at("miss_rate").get<double>();
  if (j.contains("false_positive_rate")) {
    noise.false_positive_rate = j.at("false_positive_rate").get<double>();
  }
  if (j.contains("state_confusion")) noise.state_confusion = j.at("state_confusion").get<double>();
  if (j.contains("pictogram_confusion")) {
    noise.pictogram_confusion = j.at("pictogram_confusion").get<double>();
  }
  if (j.contains("pixel_sigma")) noise.pixel_sigma = j.at("pixel_sigma").get<double>();
  if (j.contains("localization_offset")) {
    noise.localization_offset =
        jsonu::as_vec3(j.at("localization_offset"), ctx + ": 'localization_offset'");
  }
  if (j.contains("confidence_range")) {
    const json& range = j.at("confidence_range");
    if (!range.is_array() || range.size() != 2 || !range[0].is_number() ||
        !range[1].is_number()) {
      throw ParseError(ctx + ": 'confidence_range' must be [lo, hi]");
    }
    noise.confidence_lo = range[0].get<double>();
    noise.confidence_hi = range[1].get<double>();
  }
  if (j.contains("seed")) noise.seed = j.at("seed").get<std::uint64_t>();
  try {
    validate_params(noise);
  } catch (const ValidationError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  return noise;
}

}  // namespace

void validate_params(const NoiseModel& noise) {
  const auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability(noise.miss_rate) || !probability(noise.state_confusion) ||
      !probability(noise.pictogram_confusion)) {
    throw ValidationError("noise probabilities must lie in [0, 1]");
  }
  if (noise.false_positive_rate < 0.0) {
    throw ValidationError("false positive rate must be non-negative");
  }
  if (noise.pixel_sigma < 0.0) throw ValidationError("pixel sigma must be non-negative");
  if (!(noise.confidence_lo >= 0.0 && noise.confidence_lo <= noise.confidence_hi &&
        noise.confidence_hi <= 1.0)) {
    throw ValidationError("confidence range must satisfy 0 <= lo <= hi <= 1");
  }
}

const CameraModel* Scenario::camera(CameraId id) const {
  for (const auto& cam : cameras) {
    if (cam.id == id) return &cam;
  }
  return nullptr;
}

SignalState Scenario::state_at(std::string_view group_id, std::int64_t t_ns) const {
  for (const auto& schedule : phases) {
    if (schedule.group_id != group_id) continue;
    for (std::size_t i = 0; i < schedule.intervals.size(); ++i) {
      const auto& interval = schedule.intervals[i];
      const bool last = (i + 1 == schedule.intervals.size());
      if (t_ns >= interval.from_ns && (t_ns < interval.to_ns || (last && t_ns == interval.to_ns))) {
        return interval.state;
      }
    }
    throw ValidationError("no scheduled state for group '" + std::string(group_id) + "' at t=" +
                          std::to_string(t_ns));
  }
  throw ValidationError("no phase schedule for group '" + std::string(group_id) + "'");
}

std::vector<std::int64_t> Scenario::state_changes(std::string_view group_id, std::int64_t lo_ns,
                                                  std::int64_t hi_ns) const {
  std::vector<std::int64_t> changes;
  for (const auto& schedule : phases) {
    if (schedule.group_id != group_id) continue;
    for (std::size_t i = 1; i < schedule.intervals.size(); ++i) {
      const std::int64_t boundary = schedule.intervals[i].from_ns;
      if (schedule.intervals[i].state != schedule.intervals[i - 1].state && boundary > lo_ns &&
          boundary <= hi_ns) {
        changes.push_back(boundary);
      }
    }
  }
  return changes;
}

std::optional<std::string> Scenario::relevant_group_at(std::int64_t t_ns) const {
  for (const auto& interval : relevant) {
    if (t_ns >= interval.from_ns && t_ns < interval.to_ns) return interval.group_id;
  }
  return std::nullopt;
}

EgoPose Scenario::pose_at(std::int64_t t_ns) const {
  if (trajectory.empty()) throw ValidationError("scenario trajectory is empty");
  if (t_ns <= trajectory.front().timestamp_ns) return trajectory.front();
  if (t_ns >= trajectory.back().timestamp_ns) return trajectory.back();
  auto upper = std::upper_bound(trajectory.begin(), trajectory.end(), t_ns,
                                [](std::int64_t t, const EgoPose& p) {
                                  return t < p.timestamp_ns;
                                });
  const EgoPose& next = *upper;
  const EgoPose& prev = *(upper - 1);
  const double span = static_cast<double>(next.timestamp_ns - prev.timestamp_ns);
  const double alpha = static_cast<double>(t_ns - prev.timestamp_ns) / span;

  EgoPose pose;
  pose.timestamp_ns = t_ns;
  pose.position = (1.0 - alpha) * prev.position + alpha * next.position;
  pose.heading = ((1.0 - alpha) * prev.heading + alpha * next.heading).normalized();
  pose.speed_mps = (1.0 - alpha) * prev.speed_mps + alpha * next.speed_mps;
  return pose;
}

namespace {

void validate_scenario(const Scenario& scenario, const std::string& source) {
  if (scenario.trajectory.empty()) throw ValidationError(source + ": trajectory is empty");
  for (std::size_t i = 1; i < scenario.trajectory.size(); ++i) {
    if (scenario.trajectory[i].timestamp_ns <= scenario.trajectory[i - 1].timestamp_ns) {
      throw ValidationError(source + ": trajectory timestamps must be strictly increasing");
    }
  }
  if (scenario.cameras.empty()) throw ValidationError(source + ": no cameras defined");

  const std::int64_t start = scenario.start_ns();
  const std::int64_t end = scenario.end_ns();

  // Every group needs a total schedule over the trajectory span: contiguous
  // intervals with no gap, or the simulator would have ticks without ground
  // truth.
  for (const auto& group : scenario.map.groups()) {
    const PhaseSchedule* schedule = nullptr;
    for (const auto& s : scenario.phases) {
      if (s.group_id == group.id) schedule = &s;
    }
    if (schedule == nullptr) {
      throw ValidationError(source + ": no phase schedule for group '" + group.id + "'");
    }
    if (schedule->intervals.empty()) {
      throw ValidationError(source + ": empty phase schedule for group '" + group.id + "'");
    }
    for (std::size_t i = 0; i < schedule->intervals.size(); ++i) {
      const auto& interval = schedule->intervals[i];
      if (interval.from_ns >= interval.to_ns) {
        throw ValidationError(source + ": group '" + group.id +
                              "' has a phase interval with from >= to");
      }
      if (interval.state == SignalState::unknown) {
        throw ValidationError(source + ": group '" + group.id +
                              "' schedules state 'unknown', which is not displayable");
      }
      if (i > 0 && interval.from_ns != schedule->intervals[i - 1].to_ns) {
        throw ValidationError(source + ": phase schedule of group '" + group.id +
                              "' has a gap or overlap at t=" + std::to_string(interval.from_ns));
      }
    }
    if (schedule->intervals.front().from_ns > start || schedule->intervals.back().to_ns < end) {
      throw ValidationError(source + ": phase schedule of group '" + group.id +
                            "' does not cover the trajectory span");
    }
  }
  for (const auto& schedule : scenario.phases) {
    if (scenario.map.find_group(schedule.group_id) == nullptr) {
      throw ValidationError(source + ": phase schedule references unknown group '" +
                            schedule.group_id + "'");
    }
  }
  for (std::size_t i = 0; i < scenario.relevant.size(); ++i) {
    const auto& interval = scenario.relevant[i];
    if (scenario.map.find_group(interval.group_id) == nullptr) {
      throw ValidationError(source + ": relevant timeline references unknown group '" +
                            interval.group_id + "'");
    }
    if (interval.from_ns >= interval.to_ns) {
      throw ValidationError(source + ": relevant interval with from >= to");
    }
    if (i > 0 && interval.from_ns < scenario.relevant[i - 1].to_ns) {
      throw ValidationError(source + ": relevant intervals overlap");
    }
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source_name,
                        const std::filesystem::path& base_dir) {
  const std::string source(source_name);
  const json doc = jsonu::parse_text(text, source_name);
  if (!doc.is_object()) throw ParseError(source + ": scenario must be a JSON object");

  Scenario scenario;
  const json& jmap = jsonu::require(doc, "map", source);
  if (jmap.is_string()) {
    scenario.map = load_map(base_dir / jmap.get<std::string>());
  } else {
    // Inline map object.
    scenario.map = parse_map(jmap.dump(), source + ": map");
  }

  scenario.cameras = cameras_from_json(jsonu::require(doc, "cameras", source), source);

  const json& jtraj = jsonu::require(doc, "trajectory", source);
  if (!jtraj.is_array()) throw ParseError(source + ": 'trajectory' must be an array");
  for (std::size_t i = 0; i < jtraj.size(); ++i) {
    scenario.trajectory.push_back(
        pose_from_json(jtraj[i], source + ": trajectory[" + std::to_string(i) + "]"));
  }

  const json& jphases = jsonu::require(doc, "phases", source);
  if (!jphases.is_array()) throw ParseError(source + ": 'phases' must be an array");
  for (std::size_t i = 0; i < jphases.size(); ++i) {
    const std::string ctx = source + ": phases[" + std::to_string(i) + "]";
    PhaseSchedule schedule;
    schedule.group_id = jsonu::require_string(jphases[i], "group", ctx);
    const json& jintervals = jsonu::require(jphases[i], "intervals", ctx);
    if (!jintervals.is_array()) throw ParseError(ctx + ": 'intervals' must be an array");
    for (const auto& ji : jintervals) {
      PhaseInterval interval;
      interval.from_ns = jsonu::require_int(ji, "from", ctx);
      interval.to_ns = jsonu::require_int(ji, "to", ctx);
      interval.state = signal_state_from_string(jsonu::require_string(ji, "state", ctx));
      schedule.intervals.push_back(interval);
    }
    scenario.phases.push_back(std::move(schedule));
  }

  if (doc.contains("relevant")) {
    const json& jrel = doc.at("relevant");
    if (!jrel.is_array()) throw ParseError(source + ": 'relevant' must be an array");
    for (const auto& ji : jrel) {
      RelevantInterval interval;
      interval.from_ns = jsonu::require_int(ji, "from", source + ": relevant");
      interval.to_ns = jsonu::require_int(ji, "to", source + ": relevant");
      interval.group_id = jsonu::require_string(ji, "group", source + ": relevant");
      scenario.relevant.push_back(std::move(interval));
    }
  }

  scenario.noise = noise_from_json(doc.contains("noise") ? doc.at("noise") : json(nullptr),
                                   source + ": noise");

  validate_scenario(scenario, source);
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw IoError("file not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text, path.string(), path.parent_path());
}

std::vector<CameraModel> load_cameras(const std::filesystem::path& path) {
  const json doc = jsonu::load_file(path);
  if (!doc.is_object() || !doc.contains("cameras")) {
    throw ParseError(path.string() + ": no 'cameras' array present");
  }
  return cameras_from_json(doc.at("cameras"), path.string());
}

}  // namespace tlp

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlp/errors.hpp"
#include "tlp/ingest.hpp"
#include "tlp/simulator.hpp"

namespace {

namespace fs = std::filesystem;

// Exit codes: 0 success, 2 input parse failure, 3 invariant violation,
// 4 I/O failure, 64 command line usage error, 1 anything else.
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;
constexpr int kExitUsage = 64;

struct CommonOptions {
  double cap = 10.0;
  double accept = 2.0;
  double region = 180.0;
  int buffer_capacity = 9;
  double decay_horizon = 3.0;
  double mismatch_factor = 0.5;
  double switch_distance = 10.0;
  double tick_rate = 20.0;
  double latency_offset_ms = 0.0;
  std::optional<std::uint64_t> seed;
  bool compare_nearest = false;
  int verbosity = 0;
};

void add_common_flags(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--cap", opts.cap, "Edge cost cap, meters");
  cmd.add_option("--accept", opts.accept, "Association acceptance threshold, meters");
  cmd.add_option("--region", opts.region, "Forward map region, meters");
  cmd.add_option("--buffer-capacity", opts.buffer_capacity, "Per-light circular buffer size");
  cmd.add_option("--decay-horizon", opts.decay_horizon, "Linear weight decay horizon, seconds");
  cmd.add_option("--mismatch-factor", opts.mismatch_factor,
                 "Weight factor for mismatched pictograms");
  cmd.add_option("--switch-distance", opts.switch_distance,
                 "Tele-to-wide switch distance, meters");
  cmd.add_option("--tick-rate", opts.tick_rate, "Simulation tick rate, Hz");
  cmd.add_option("--latency-offset-ms", opts.latency_offset_ms,
                 "Constant capture/inference latency added to reported latencies");
  cmd.add_option("--seed", opts.seed, "Override the scenario's noise seed");
  cmd.add_flag("--compare-nearest", opts.compare_nearest,
               "Also run the nearest-light baseline association");
  cmd.add_flag(
      "-v,--verbose", [&opts](std::int64_t n) { opts.verbosity = static_cast<int>(n); },
      "Verbose diagnostics on stderr (-vv adds per-tick debug output)");
}

tlp::SimulationOptions simulation_options(const CommonOptions& opts) {
  tlp::SimulationOptions sim;
  sim.decision.buffer_capacity = opts.buffer_capacity;
  sim.decision.decay_horizon_s = opts.decay_horizon;
  sim.decision.mismatch_factor = opts.mismatch_factor;
  sim.assoc.cap_m = opts.cap;
  sim.assoc.accept_m = opts.accept;
  sim.assoc.region_m = opts.region;
  sim.switch_distance_m = opts.switch_distance;
  sim.tick_rate_hz = opts.tick_rate;
  sim.metrics.latency_offset_ms = opts.latency_offset_ms;
  sim.compare_nearest = opts.compare_nearest;
  sim.seed_override = opts.seed;
  tlp::validate_params(sim.decision);
  tlp::validate_params(sim.assoc);
  return sim;
}

void print_run_header(const CommonOptions& opts) {
  std::cerr << "tlp: cap=" << opts.cap << "m accept=" << opts.accept << "m region=" << opts.region
            << "m buffer=" << opts.buffer_capacity << " decay=" << opts.decay_horizon
            << "s mismatch=" << opts.mismatch_factor << " switch=" << opts.switch_distance
            << "m tick=" << opts.tick_rate << "Hz latency-offset=" << opts.latency_offset_ms
            << "ms\n";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tlp::IoError("cannot write " + path.string());
  out << content;
  if (!out) throw tlp::IoError("write failed for " + path.string());
}

int cmd_simulate(const std::string& scenario_path, const std::string& detections_path,
                 const std::string& out_dir, const CommonOptions& opts) {
  print_run_header(opts);
  const tlp::Scenario scenario = tlp::load_scenario(scenario_path);
  const tlp::SimulationOptions sim = simulation_options(opts);

  tlp::SimulationResult result;
  if (detections_path.empty()) {
    result = tlp::run_scenario(scenario, sim);
  } else {
    const auto log = tlp::load_detection_log(detections_path);
    result = tlp::replay_detections(scenario, log, sim);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw tlp::IoError("cannot create output directory " + out_dir);

  std::ostringstream trace_text;
  tlp::write_trace(trace_text, result.trace);
  write_file(fs::path(out_dir) / "trace.ndjson", trace_text.str());
  write_file(fs::path(out_dir) / "metrics.json",
             tlp::metrics_to_json(result.metrics, result.comparison) + "\n");
  if (opts.verbosity >= 2) {
    std::ostringstream debug_text;
    tlp::write_debug_events(debug_text, result.trace);
    write_file(fs::path(out_dir) / "debug.ndjson", debug_text.str());
  }

  if (opts.verbosity >= 1) {
    std::cerr << "tlp: " << result.trace.decisions.size() << " decision records, "
              << result.trace.associations.size() << " associations\n"
              << tlp::metrics_to_json(result.metrics, result.comparison) << "\n";
  }
  return 0;
}

Eigen::Vector3d parse_pose(const std::string& text, double& yaw) {
  std::istringstream in(text);
  double x = 0, y = 0, z = 0;
  char c1 = 0, c2 = 0, c3 = 0;
  if (!(in >> x >> c1 >> y >> c2 >> z >> c3 >> yaw) || c1 != ',' || c2 != ',' || c3 != ',') {
    throw tlp::ValidationError("--pose expects 'x,y,z,yaw', got '" + text + "'");
  }
  return {x, y, z};
}

int cmd_associate(const std::string& map_path, const std::string& detections_path,
                  const std::string& pose_text, const std::string& camera_name,
                  const CommonOptions& opts) {
  print_run_header(opts);
  const tlp::HdMap map = tlp::load_map(map_path);
  const auto cameras = tlp::load_cameras(map_path);
  const tlp::CameraId camera_id = tlp::camera_id_from_string(camera_name);

  const tlp::CameraModel* mount = nullptr;
  for (const auto& cam : cameras) {
    if (cam.id == camera_id) mount = &cam;
  }
  if (mount == nullptr) {
    std::string valid;
    for (const auto& cam : cameras) valid += (valid.empty() ? "" : ", ") + to_string(cam.id);
    throw tlp::ValidationError("camera '" + camera_name + "' not defined in " + map_path +
                               " (available: " + (valid.empty() ? "none" : valid) + ")");
  }

  double yaw = 0.0;
  const Eigen::Vector3d position = parse_pose(pose_text, yaw);
  const Eigen::Vector3d heading(std::cos(yaw), std::sin(yaw), 0.0);
  const tlp::CameraModel camera = tlp::camera_in_world(*mount, position, heading);

  auto detections = tlp::load_detection_log(detections_path);
  std::erase_if(detections, [&](const tlp::Detection& d) { return d.camera_id != camera_id; });

  tlp::AssociationParams params;
  params.cap_m = opts.cap;
  params.accept_m = opts.accept;
  params.region_m = opts.region;
  tlp::validate_params(params);

  if (opts.verbosity >= 2) {
    std::vector<tlp::Ray> rays;
    rays.reserve(detections.size());
    for (const auto& det : detections) {
      rays.push_back(tlp::pixel_ray(camera, tlp::bbox_center(det)));
    }
    const auto lights = tlp::lights_in_region(map, position, heading, params.region_m);
    const tlp::CostMatrix matrix = tlp::build_cost_matrix(rays, lights, params.cap_m);
    nlohmann::json jmatrix = nlohmann::json::array();
    for (int r = 0; r < matrix.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < matrix.cols(); ++c) row.push_back(matrix.at(r, c));
      jmatrix.push_back(row);
    }
    nlohmann::json jlights = nlohmann::json::array();
    for (const auto* light : lights) jlights.push_back(light->id);
    std::cout << nlohmann::json{{"cost_matrix", jmatrix}, {"lights", jlights}}.dump() << "\n";
  }

  const auto outcome = tlp::associate(detections, camera, map, position, heading, params);
  std::optional<tlp::AssociationOutcome> nearest;
  if (opts.compare_nearest) {
    nearest = tlp::associate_nearest(detections, camera, map, position, heading, params);
  }

  for (std::size_t i = 0; i < detections.size(); ++i) {
    nlohmann::json line{{"detection", i}, {"light", nullptr}, {"cost", nullptr},
                        {"unassociated", true}};
    for (const auto& assoc : outcome.associations) {
      if (assoc.detection_index == static_cast<int>(i)) {
        line["light"] = assoc.light_id;
        line["cost"] = assoc.cost_m;
        line["unassociated"] = false;
      }
    }
    if (nearest) {
      line["nearest_light"] = nullptr;
      for (const auto& assoc : nearest->associations) {
        if (assoc.detection_index == static_cast<int>(i)) {
          line["nearest_light"] = assoc.light_id;
        }
      }
    }
    std::cout << line.dump() << "\n";
  }
  return 0;
}

int cmd_validate_map(const std::string& map_path) {
  const tlp::MapDocument doc = tlp::load_map_document(map_path);
  const auto violations = tlp::map_violations(doc.lights, doc.groups);
  for (const auto& violation : violations) {
    std::cout << nlohmann::json{{"violation", violation}}.dump() << "\n";
  }
  if (!violations.empty()) {
    std::cerr << "tlp: " << map_path << ": " << violations.size() << " violation(s)\n";
    return kExitValidation;
  }
  std::cerr << "tlp: " << map_path << ": ok (" << doc.lights.size() << " lights, "
            << doc.groups.size() << " groups)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic light perception pipeline: map-based association and decision smoothing"};
  app.require_subcommand(1);

  CommonOptions opts;

  std::string scenario_path;
  std::string detections_path;
  std::string out_dir = "tlp-out";
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run a scenario (or replay a detection log) and write trace + metrics");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  simulate->add_option("--detections", detections_path,
                       "Detection log (NDJSON); replaces synthetic detections");
  simulate->add_option("--out", out_dir, "Output directory for trace.ndjson and metrics.json");
  add_common_flags(*simulate, opts);

  std::string map_path;
  std::string assoc_detections;
  std::string pose_text;
  std::string camera_name;
  CLI::App* associate =
      app.add_subcommand("associate", "Associate one frame of detections against a map");
  associate->add_option("--map", map_path, "HD map JSON file (with a 'cameras' array)")
      ->required();
  associate->add_option("--detections", assoc_detections, "Detection log (NDJSON)")->required();
  associate->add_option("--pose", pose_text, "Ego pose as 'x,y,z,yaw'")->required();
  associate->add_option("--camera", camera_name, "Camera id, e.g. front_medium")->required();
  add_common_flags(*associate, opts);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate-map", "Check every HD map invariant");
  validate->add_option("--map", validate_path, "HD map JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path, detections_path, out_dir, opts);
    if (associate->parsed()) {
      return cmd_associate(map_path, assoc_detections, pose_text, camera_name, opts);
    }
    if (validate->parsed()) return cmd_validate_map(validate_path);
  } catch (const tlp::ParseError& e) {
    std::cerr << "tlp: parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const tlp::IoError& e) {
    std::cerr << "tlp: io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tlp::ValidationError& e) {
    std::cerr << "tlp: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "tlp: error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "support/helpers.hpp"
#include "tlp/ingest.hpp"

namespace tlp::testing {

constexpr std::int64_t kSecond = 1'000'000'000;

inline std::int64_t seconds(double s) { return static_cast<std::int64_t>(s * 1e9); }

/// Static ego staring at one red light that turns green at `change_s`.
/// `two_streams` adds the front-tele camera, doubling the per-tick evidence
/// the way the deployed two-detector setup does.
inline Scenario single_light_scenario(double duration_s = 10.0, double change_s = 5.0,
                                      bool two_streams = false, std::uint64_t seed = 1,
                                      double confidence = 0.9) {
  MappedTrafficLight light;
  light.id = "tl1";
  light.position = {80.0, 0.0, 5.0};
  light.pictogram = Pictogram::circle;
  light.group_id = "g1";
  SignalGroup group;
  group.id = "g1";
  group.members = {"tl1"};
  group.stop_line = {75.0, 0.0, 0.0};

  Scenario scenario;
  scenario.map = HdMap({light}, {group});
  scenario.cameras.push_back(front_medium_camera({0.0, 0.0, 1.6}));
  if (two_streams) scenario.cameras.push_back(front_tele_camera({0.0, 0.0, 1.6}));

  EgoPose start;
  start.timestamp_ns = 0;
  start.position = {0, 0, 0};
  start.heading = {1, 0, 0};
  start.speed_mps = 0.0;
  EgoPose end = start;
  end.timestamp_ns = seconds(duration_s);
  scenario.trajectory = {start, end};

  PhaseSchedule schedule;
  schedule.group_id = "g1";
  if (change_s > 0.0 && change_s < duration_s) {
    schedule.intervals = {
        {0, seconds(change_s), SignalState::red},
        {seconds(change_s), seconds(duration_s), SignalState::green},
    };
  } else {
    schedule.intervals = {{0, seconds(duration_s), SignalState::red}};
  }
  scenario.phases = {schedule};
  scenario.relevant = {{0, seconds(duration_s) + 1, "g1"}};

  scenario.noise = NoiseModel{};
  scenario.noise.confidence_lo = confidence;
  scenario.noise.confidence_hi = confidence;
  scenario.noise.seed = seed;
  return scenario;
}

/// Two lights 2.4 m apart seen from 50 m, with the perceived ego pose shifted
/// 1.5 m sideways. Detection rays then pass ~1.5 m from their true light but
/// one of them only ~0.9 m from the neighbor, which fools per-detection
/// nearest-light assignment while the global optimum stays correct.
inline Scenario localization_fault_scenario(double duration_s = 3.0, std::uint64_t seed = 1) {
  MappedTrafficLight left;
  left.id = "tl_left";
  left.position = {50.0, 1.2, 5.0};
  left.pictogram = Pictogram::straight;
  left.group_id = "g_straight";
  MappedTrafficLight right;
  right.id = "tl_right";
  right.position = {50.0, -1.2, 5.0};
  right.pictogram = Pictogram::right;
  right.group_id = "g_right";

  SignalGroup gs;
  gs.id = "g_straight";
  gs.members = {"tl_left"};
  gs.stop_line = {46.0, 1.2, 0.0};
  SignalGroup gr;
  gr.id = "g_right";
  gr.members = {"tl_right"};
  gr.stop_line = {46.0, -1.2, 0.0};

  Scenario scenario;
  scenario.map = HdMap({left, right}, {gs, gr});
  scenario.cameras.push_back(front_medium_camera({0.0, 0.0, 1.6}));

  EgoPose start;
  start.timestamp_ns = 0;
  start.position = {0, 0, 0};
  start.heading = {1, 0, 0};
  EgoPose end = start;
  end.timestamp_ns = seconds(duration_s);
  scenario.trajectory = {start, end};

  for (const char* group : {"g_straight", "g_right"}) {
    PhaseSchedule schedule;
    schedule.group_id = group;
    schedule.intervals = {{0, seconds(duration_s), SignalState::red}};
    scenario.phases.push_back(schedule);
  }
  scenario.relevant = {{0, seconds(duration_s) + 1, "g_right"}};

  scenario.noise = NoiseModel{};
  scenario.noise.localization_offset = {0.0, 1.5, 0.0};
  scenario.noise.confidence_lo = 0.9;
  scenario.noise.confidence_hi = 0.9;
  scenario.noise.seed = seed;
  return scenario;
}

/// Roughly ten minutes of urban driving: six signalized intersections spaced
/// 600 m apart, two lights per signal group, arrival on red, a 40 s wait and
/// departure on green. The relevant group switches at each stop line.
inline Scenario route_scenario(const NoiseModel& noise) {
  constexpr int kIntersections = 6;
  constexpr double kSpacing = 600.0;
  constexpr double kFirstStop = 600.0;
  constexpr double kCruise = 12.0;
  constexpr double kBrakeZone = 60.0;   // braked at constant-deceleration average
  constexpr double kDwell = 40.0;
  constexpr double kAccelZone = 36.0;

  Scenario scenario;

  std::vector<MappedTrafficLight> lights;
  std::vector<SignalGroup> groups;
  for (int k = 0; k < kIntersections; ++k) {
    const double stop_x = kFirstStop + k * kSpacing;
    const std::string gid = "g" + std::to_string(k);
    MappedTrafficLight overhead;
    overhead.id = gid + "_overhead";
    overhead.position = {stop_x + 18.0, 0.0, 5.5};
    overhead.pictogram = Pictogram::circle;
    overhead.group_id = gid;
    MappedTrafficLight pole;
    pole.id = gid + "_pole";
    pole.position = {stop_x + 15.0, -4.0, 3.0};
    pole.pictogram = Pictogram::circle;
    pole.group_id = gid;
    lights.push_back(overhead);
    lights.push_back(pole);

    SignalGroup group;
    group.id = gid;
    group.members = {overhead.id, pole.id};
    group.stop_line = {stop_x, 0.0, 0.0};
    groups.push_back(group);
  }
  scenario.map = HdMap(lights, groups);

  scenario.cameras.push_back(front_medium_camera({0.0, 0.0, 1.6}));
  scenario.cameras.push_back(front_tele_camera({0.0, 0.0, 1.6}));
  scenario.cameras.push_back(front_wide_camera({0.0, 0.0, 1.6}));

  const auto waypoint = [](double t_s, double x, double speed) {
    EgoPose pose;
    pose.timestamp_ns = seconds(t_s);
    pose.position = {x, 0.0, 0.0};
    pose.heading = {1, 0, 0};
    pose.speed_mps = speed;
    return pose;
  };

  double t = 0.0;
  double x = 0.0;
  scenario.trajectory.push_back(waypoint(t, x, kCruise));
  std::vector<double> departures;
  for (int k = 0; k < kIntersections; ++k) {
    const double stop_x = kFirstStop + k * kSpacing;
    // Cruise to the braking zone.
    const double cruise_dist = stop_x - kBrakeZone - x;
    t += cruise_dist / kCruise;
    x = stop_x - kBrakeZone;
    scenario.trajectory.push_back(waypoint(t, x, kCruise));
    // Brake to the stop line (average speed kCruise / 2).
    t += kBrakeZone / (kCruise / 2.0);
    x = stop_x;
    scenario.trajectory.push_back(waypoint(t, x, 0.0));
    // Dwell at red.
    t += kDwell;
    scenario.trajectory.push_back(waypoint(t, x, 0.0));
    departures.push_back(t);
    // Accelerate back to cruise speed.
    t += kAccelZone / (kCruise / 2.0);
    x += kAccelZone;
    scenario.trajectory.push_back(waypoint(t, x, kCruise));
  }
  // Clear the last intersection.
  t += 30.0;
  x += 30.0 * kCruise;
  scenario.trajectory.push_back(waypoint(t, x, kCruise));
  const double end_s = t;

  for (int k = 0; k < kIntersections; ++k) {
    const std::string gid = "g" + std::to_string(k);
    const double depart = departures[k];
    PhaseSchedule schedule;
    schedule.group_id = gid;
    schedule.intervals = {
        {0, seconds(depart - 1.0), SignalState::red},
        {seconds(depart - 1.0), seconds(depart), SignalState::red_yellow},
        {seconds(depart), seconds(end_s), SignalState::green},
    };
    scenario.phases.push_back(schedule);

    RelevantInterval interval;
    interval.from_ns = k == 0 ? 0 : seconds(departures[k - 1]);
    interval.to_ns = seconds(depart);
    interval.group_id = gid;
    scenario.relevant.push_back(interval);
  }

  scenario.noise = noise;
  return scenario;
}

inline NoiseModel acceptance_noise(std::uint64_t seed) {
  NoiseModel noise;
  noise.miss_rate = 0.05;
  noise.state_confusion = 0.10;
  noise.pictogram_confusion = 0.10;
  noise.pixel_sigma = 2.0;
  noise.confidence_lo = 0.6;
  noise.confidence_hi = 0.95;
  noise.seed = seed;
  return noise;
}

}  // namespace tlp::testing

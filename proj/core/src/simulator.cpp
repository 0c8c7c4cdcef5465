#include "tlp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "tlp/errors.hpp"

namespace tlp {

std::vector<VisibleLight> visible_lights(const HdMap& map, const CameraModel& world_camera,
                                         const Eigen::Vector3d& ego_position,
                                         const Eigen::Vector3d& ego_heading, double region_m) {
  std::vector<VisibleLight> result;
  for (const auto* light : lights_in_region(map, ego_position, ego_heading, region_m)) {
    if (const auto proj = project_point(world_camera, light->position)) {
      result.push_back(VisibleLight{light, proj->pixel, proj->depth});
    }
  }
  return result;
}

namespace {

SignalState confuse_state(SignalState truth, Rng& rng) {
  std::array<SignalState, 4> others{};
  std::size_t n = 0;
  for (SignalState s : kDisplayableStates) {
    if (s != truth) others[n++] = s;
  }
  return others[rng.uniform_int(n)];
}

Pictogram confuse_pictogram(Pictogram truth, Rng& rng) {
  std::array<Pictogram, 5> others{};
  std::size_t n = 0;
  for (Pictogram p : kAllPictograms) {
    if (p != truth) others[n++] = p;
  }
  return others[rng.uniform_int(n)];
}

std::array<double, 4> clamped_bbox(double center_x, double center_y, double half_w, double half_h,
                                   const CameraModel& cam) {
  half_w = std::min(half_w, (cam.width - 1.0) / 2.0);
  half_h = std::min(half_h, (cam.height - 1.0) / 2.0);
  center_x = std::clamp(center_x, half_w, cam.width - half_w);
  center_y = std::clamp(center_y, half_h, cam.height - half_h);
  return {center_x - half_w, center_y - half_h, center_x + half_w, center_y + half_h};
}

}  // namespace

SynthResult synth_detections(const GroundTruthFrame& frame, const CameraModel& world_camera,
                             const NoiseModel& noise, Rng& rng) {
  SynthResult out;
  for (std::size_t i = 0; i < frame.visible.size(); ++i) {
    const VisibleLight& vis = frame.visible[i];
    const double width_px = world_camera.fx * kLightWidthM / vis.depth_m;
    if (width_px < kMinDetectablePx) continue;  // too small to classify

    // Fixed draw order per light: miss, state, pictogram, jitter x, jitter y,
    // confidence. Replays with the same seed are bit-identical.
    if (rng.bernoulli(noise.miss_rate)) continue;

    SignalState state = state_of(frame.true_class[i]);
    if (rng.bernoulli(noise.state_confusion)) state = confuse_state(state, rng);

    Pictogram pictogram = vis.light->pictogram;
    if (rng.bernoulli(noise.pictogram_confusion)) pictogram = confuse_pictogram(pictogram, rng);

    const double jitter_x = rng.gaussian(0.0, noise.pixel_sigma);
    const double jitter_y = rng.gaussian(0.0, noise.pixel_sigma);
    const double confidence = rng.uniform(noise.confidence_lo, noise.confidence_hi);

    const double height_px = world_camera.fy * kLightHeightM / vis.depth_m;
    const double half_w = std::max(width_px, kMinDetectablePx) / 2.0;
    const double half_h = std::max(height_px, kMinDetectablePx) / 2.0;

    Detection det;
    det.timestamp_ns = frame.t_ns;
    det.camera_id = world_camera.id;
    det.bbox = clamped_bbox(vis.pixel.x() + jitter_x, vis.pixel.y() + jitter_y, half_w, half_h,
                            world_camera);
    det.cls = make_light_class(state, pictogram);
    det.confidence = confidence;
    out.detections.push_back(det);
    out.source_light.push_back(vis.light->id);
  }

  const int spurious = rng.poisson(noise.false_positive_rate);
  for (int k = 0; k < spurious; ++k) {
    constexpr double kFpHalfW = 4.0;
    constexpr double kFpHalfH = 10.0;
    const double center_x = rng.uniform(kFpHalfW, world_camera.width - kFpHalfW);
    const double center_y = rng.uniform(kFpHalfH, world_camera.height - kFpHalfH);
    const auto cls = static_cast<LightClass>(rng.uniform_int(kLightClassCount));
    Detection det;
    det.timestamp_ns = frame.t_ns;
    det.camera_id = world_camera.id;
    det.bbox = clamped_bbox(center_x, center_y, kFpHalfW, kFpHalfH, world_camera);
    det.cls = cls;
    det.confidence = rng.uniform(noise.confidence_lo, noise.confidence_hi);
    out.detections.push_back(det);
    out.source_light.emplace_back();
  }
  return out;
}

namespace {

void validate_options(const SimulationOptions& options) {
  validate_params(options.decision);
  validate_params(options.assoc);
  if (!(options.tick_rate_hz > 0.0)) throw ValidationError("tick rate must be positive");
  if (!(options.switch_distance_m > 0.0)) {
    throw ValidationError("switch distance must be positive");
  }
}

struct TickContext {
  std::int64_t t = 0;
  EgoPose true_pose;
  EgoPose perceived_pose;
  double stop_line_distance = std::numeric_limits<double>::infinity();
};

TickContext make_tick_context(const Scenario& scenario, const NoiseModel& noise, std::int64_t t) {
  TickContext ctx;
  ctx.t = t;
  ctx.true_pose = scenario.pose_at(t);
  ctx.perceived_pose = ctx.true_pose;
  ctx.perceived_pose.position += noise.localization_offset;
  if (const auto relevant = scenario.relevant_group_at(t)) {
    const SignalGroup* group = scenario.map.find_group(*relevant);
    ctx.stop_line_distance = (ctx.perceived_pose.position - group->stop_line).norm();
  }
  return ctx;
}

std::vector<const CameraModel*> active_cameras(const Scenario& scenario, const TickContext& ctx,
                                               double switch_distance_m) {
  StreamSchedule schedule;
  schedule.secondary = std::isfinite(ctx.stop_line_distance)
                           ? select_second_stream(ctx.stop_line_distance, switch_distance_m)
                           : CameraId::front_tele;
  std::vector<const CameraModel*> active;
  if (const CameraModel* cam = scenario.camera(schedule.primary)) active.push_back(cam);
  if (const CameraModel* cam = scenario.camera(schedule.secondary)) active.push_back(cam);
  return active;
}

void record_outcome(Trace& trace, BufferMap& buffers, const Scenario& scenario,
                    const SimulationOptions& options, const AssociationOutcome& outcome,
                    std::span<const Detection> detections, CameraId camera, std::int64_t t) {
  for (const auto& assoc : outcome.associations) {
    push_association(buffers, assoc, detections[assoc.detection_index], scenario.map,
                     options.decision);
    trace.associations.push_back(
        AssociationEvent{t, camera, assoc.detection_index, assoc.light_id, assoc.cost_m});
  }
  for (const int index : outcome.unassociated) {
    trace.unassociated.push_back(UnassociatedEvent{t, camera, index});
  }
}

std::int64_t count_misassociations(const AssociationOutcome& outcome,
                                   const std::vector<std::string>& source_light) {
  std::int64_t wrong = 0;
  for (const auto& assoc : outcome.associations) {
    if (source_light[assoc.detection_index] != assoc.light_id) ++wrong;
  }
  return wrong;
}

void append_decisions(Trace& trace, const Scenario& scenario, const BufferMap& buffers,
                      const DecisionParams& params, std::int64_t t) {
  for (const auto& group : scenario.map.groups()) {
    const GroupDecision decision = group_state(group, buffers, t, scenario.map, params);
    trace.decisions.push_back(
        DecisionRecord{t, group.id, decision.state, decision.confidence,
                       decision.determining_light});
  }
}

}  // namespace

SimulationResult run_scenario(const Scenario& scenario, const SimulationOptions& options) {
  validate_options(options);
  NoiseModel noise = scenario.noise;
  if (options.seed_override) noise.seed = *options.seed_override;
  validate_params(noise);
  Rng rng(noise.seed);

  const std::int64_t step = std::llround(1e9 / options.tick_rate_hz);
  BufferMap buffers;
  Trace trace;
  AssociationComparison comparison;

  for (std::int64_t t = scenario.start_ns(); t <= scenario.end_ns(); t += step) {
    const TickContext ctx = make_tick_context(scenario, noise, t);
    bool hungarian_wrong = false;
    bool nearest_wrong = false;

    for (const CameraModel* mount : active_cameras(scenario, ctx, options.switch_distance_m)) {
      const CameraModel true_camera =
          camera_in_world(*mount, ctx.true_pose.position, ctx.true_pose.heading);

      GroundTruthFrame frame;
      frame.t_ns = t;
      frame.visible = visible_lights(scenario.map, true_camera, ctx.true_pose.position,
                                     ctx.true_pose.heading, options.assoc.region_m);
      frame.true_class.reserve(frame.visible.size());
      for (const auto& vis : frame.visible) {
        const SignalState state = scenario.state_at(vis.light->group_id, t);
        frame.true_class.push_back(make_light_class(state, vis.light->pictogram));
      }

      const SynthResult synth = synth_detections(frame, true_camera, noise, rng);

      const CameraModel perceived_camera =
          camera_in_world(*mount, ctx.perceived_pose.position, ctx.perceived_pose.heading);
      const AssociationOutcome outcome =
          associate(synth.detections, perceived_camera, scenario.map,
                    ctx.perceived_pose.position, ctx.perceived_pose.heading, options.assoc);
      record_outcome(trace, buffers, scenario, options, outcome, synth.detections, mount->id, t);

      if (options.compare_nearest) {
        const AssociationOutcome nearest =
            associate_nearest(synth.detections, perceived_camera, scenario.map,
                              ctx.perceived_pose.position, ctx.perceived_pose.heading,
                              options.assoc);
        const std::int64_t hw = count_misassociations(outcome, synth.source_light);
        const std::int64_t nw = count_misassociations(nearest, synth.source_light);
        comparison.hungarian_misassociations += hw;
        comparison.nearest_misassociations += nw;
        hungarian_wrong |= hw > 0;
        nearest_wrong |= nw > 0;
      }
    }

    if (options.compare_nearest) {
      ++comparison.ticks;
      comparison.hungarian_misassociation_ticks += hungarian_wrong ? 1 : 0;
      comparison.nearest_misassociation_ticks += nearest_wrong ? 1 : 0;
    }

    append_decisions(trace, scenario, buffers, options.decision, t);
  }

  SimulationResult result;
  result.trace = std::move(trace);
  result.metrics = compute_metrics(result.trace, scenario, options.metrics);
  if (options.compare_nearest) result.comparison = comparison;
  return result;
}

SimulationResult replay_detections(const Scenario& scenario, std::span<const Detection> log,
                                   const SimulationOptions& options) {
  validate_options(options);
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (log[i].timestamp_ns < log[i - 1].timestamp_ns) {
      throw ValidationError("detection log must be sorted by timestamp");
    }
  }

  const std::int64_t step = std::llround(1e9 / options.tick_rate_hz);
  BufferMap buffers;
  Trace trace;
  std::size_t cursor = 0;

  for (std::int64_t t = scenario.start_ns(); t <= scenario.end_ns(); t += step) {
    // Consume every camera frame recorded up to this tick, in time order and
    // camera order within one timestamp.
    while (cursor < log.size() && log[cursor].timestamp_ns <= t) {
      const std::int64_t frame_t = log[cursor].timestamp_ns;
      std::size_t frame_end = cursor;
      while (frame_end < log.size() && log[frame_end].timestamp_ns == frame_t) ++frame_end;

      for (const CameraId camera_id :
           {CameraId::front_medium, CameraId::front_tele, CameraId::front_wide}) {
        std::vector<Detection> frame;
        for (std::size_t i = cursor; i < frame_end; ++i) {
          if (log[i].camera_id == camera_id) frame.push_back(log[i]);
        }
        if (frame.empty()) continue;
        const CameraModel* mount = scenario.camera(camera_id);
        if (mount == nullptr) {
          throw ValidationError("detection log references camera '" + to_string(camera_id) +
                                "' which the scenario does not define");
        }
        const EgoPose pose = scenario.pose_at(frame_t);
        const CameraModel camera = camera_in_world(*mount, pose.position, pose.heading);
        const AssociationOutcome outcome = associate(frame, camera, scenario.map, pose.position,
                                                     pose.heading, options.assoc);
        record_outcome(trace, buffers, scenario, options, outcome, frame, camera_id, frame_t);
      }
      cursor = frame_end;
    }

    append_decisions(trace, scenario, buffers, options.decision, t);
  }

  SimulationResult result;
  result.trace = std::move(trace);
  result.metrics = compute_metrics(result.trace, scenario, options.metrics);
  return result;
}

void write_trace(std::ostream& out, const Trace& trace) {
  for (const auto& record : trace.decisions) {
    out << to_ndjson(record) << '\n';
  }
}

void write_debug_events(std::ostream& out, const Trace& trace) {
  std::size_t a = 0;
  std::size_t u = 0;
  const auto dump_association = [&](const AssociationEvent& e) {
    nlohmann::json j{{"type", "association"},   {"t", e.t},
                     {"camera", to_string(e.camera)}, {"detection", e.detection_index},
                     {"light", e.light_id},     {"cost", e.cost_m}};
    out << j.dump() << '\n';
  };
  const auto dump_unassociated = [&](const UnassociatedEvent& e) {
    nlohmann::json j{{"type", "unassociated"},
                     {"t", e.t},
                     {"camera", to_string(e.camera)},
                     {"detection", e.detection_index}};
    out << j.dump() << '\n';
  };
  while (a < trace.associations.size() || u < trace.unassociated.size()) {
    const bool take_association =
        u >= trace.unassociated.size() ||
        (a < trace.associations.size() && trace.associations[a].t <= trace.unassociated[u].t);
    if (take_association) {
      dump_association(trace.associations[a++]);
    } else {
      dump_unassociated(trace.unassociated[u++]);
    }
  }
}

}  // namespace tlp

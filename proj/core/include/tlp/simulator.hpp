#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlp/association.hpp"
#include "tlp/decision.hpp"
#include "tlp/ingest.hpp"
#include "tlp/noise.hpp"
#include "tlp/rng.hpp"

namespace tlp {

/// Physical light housing size assumed when synthesizing detections and for
/// the visibility floor (housings narrower than 2 px are never emitted).
inline constexpr double kLightWidthM = 0.3;
inline constexpr double kLightHeightM = 0.9;
inline constexpr double kMinDetectablePx = 2.0;

struct VisibleLight {
  const MappedTrafficLight* light = nullptr;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();  // projected center
  double depth_m = 0.0;
};

/// In-region lights that project into the camera frame with positive depth.
std::vector<VisibleLight> visible_lights(const HdMap& map, const CameraModel& world_camera,
                                         const Eigen::Vector3d& ego_position,
                                         const Eigen::Vector3d& ego_heading,
                                         double region_m = 180.0);

struct GroundTruthFrame {
  std::int64_t t_ns = 0;
  std::vector<VisibleLight> visible;
  std::vector<LightClass> true_class;  // parallel to `visible`
};

struct SynthResult {
  std::vector<Detection> detections;
  std::vector<std::string> source_light;  // parallel; empty string = false positive
};

/// Synthesizes one camera frame from ground truth under the noise model.
/// Draw order is fixed (per light: miss, state, pictogram, jitter x, jitter
/// y, confidence; then false positives), making runs with equal seeds
/// identical.
SynthResult synth_detections(const GroundTruthFrame& frame, const CameraModel& world_camera,
                             const NoiseModel& noise, Rng& rng);

struct AssociationEvent {
  std::int64_t t = 0;
  CameraId camera = CameraId::front_medium;
  int detection_index = -1;
  std::string light_id;
  double cost_m = 0.0;
};

struct UnassociatedEvent {
  std::int64_t t = 0;
  CameraId camera = CameraId::front_medium;
  int detection_index = -1;
};

/// Full run record. The NDJSON trace file contains only the decision records;
/// association and unassociated events feed the metrics and the optional
/// debug dump.
struct Trace {
  std::vector<DecisionRecord> decisions;
  std::vector<AssociationEvent> associations;
  std::vector<UnassociatedEvent> unassociated;
};

struct RunMetrics {
  std::optional<double> mean_state_change_latency_ms;
  std::optional<double> max_state_change_latency_ms;
  std::int64_t flicker_count = 0;
  std::optional<double> accuracy_within_range;  // absent without in-range ticks
  std::map<std::string, double> first_association_distance_m;  // per group
  std::map<int, std::int64_t> confirmation_detections;         // histogram
  std::int64_t state_changes_observed = 0;
  std::int64_t state_changes_confirmed = 0;
  std::int64_t ticks_in_range = 0;
};

struct MetricsOptions {
  double latency_offset_ms = 0.0;  // constant capture/inference overhead to add
  double accuracy_range_m = 120.0;
  double flicker_window_ms = 500.0;
};

/// Evaluates a trace against the scenario's ground truth. Latency is the time
/// from each scheduled state change of the then-relevant group until the
/// trace first reports the new state. Flicker is a switch of the relevant
/// group's reported state into one that contradicts the schedule, with no
/// scheduled change within the window; recoveries and unknown transitions do
/// not count. Accuracy counts ticks with the relevant group within
/// accuracy_range_m of its stop line.
RunMetrics compute_metrics(const Trace& trace, const Scenario& scenario,
                           const MetricsOptions& options = {});

struct AssociationComparison {
  std::int64_t ticks = 0;
  std::int64_t hungarian_misassociations = 0;
  std::int64_t nearest_misassociations = 0;
  std::int64_t hungarian_misassociation_ticks = 0;
  std::int64_t nearest_misassociation_ticks = 0;
};

struct SimulationOptions {
  DecisionParams decision;
  AssociationParams assoc;
  double switch_distance_m = 10.0;
  double tick_rate_hz = 20.0;
  MetricsOptions metrics;
  bool compare_nearest = false;
  std::optional<std::uint64_t> seed_override;
};

struct SimulationResult {
  Trace trace;
  RunMetrics metrics;
  std::optional<AssociationComparison> comparison;
};

/// Deterministic closed-loop playback: per tick, schedule the camera streams,
/// synthesize detections from ground truth, associate per camera, push into
/// the per-light buffers and decide per group. Single-threaded by contract.
SimulationResult run_scenario(const Scenario& scenario, const SimulationOptions& options = {});

/// Same pipeline, but detections come from a recorded log instead of the
/// noise model. Replaying the same log yields a byte-identical trace.
SimulationResult replay_detections(const Scenario& scenario, std::span<const Detection> log,
                                   const SimulationOptions& options = {});

/// Decision records only, one NDJSON line each (the pinned trace schema).
void write_trace(std::ostream& out, const Trace& trace);

/// Association + unassociated events as NDJSON, for debugging.
void write_debug_events(std::ostream& out, const Trace& trace);

std::string metrics_to_json(const RunMetrics& metrics,
                            const std::optional<AssociationComparison>& comparison = std::nullopt);

}  // namespace tlp

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "tlp/association.hpp"
#include "tlp/hdmap.hpp"
#include "tlp/light_class.hpp"

namespace tlp {

struct BufferEntry {
  std::int64_t timestamp_ns = 0;
  LightClass cls = LightClass::off;
  double confidence = 0.0;
  CameraId camera_id = CameraId::front_medium;
};

/// Fixed-capacity ring of recent associated detections for one mapped light.
/// Entries from both camera streams land in the same buffer; the oldest entry
/// is evicted when a push exceeds capacity.
class LightBuffer {
 public:
  explicit LightBuffer(std::string light_id, int capacity = 9);

  void push(const BufferEntry& entry);

  const std::string& light_id() const { return light_id_; }
  int capacity() const { return capacity_; }
  const std::deque<BufferEntry>& entries() const { return entries_; }

 private:
  std::string light_id_;
  int capacity_ = 9;
  std::deque<BufferEntry> entries_;  // insertion order, oldest first
};

struct DecisionParams {
  int buffer_capacity = 9;
  double decay_horizon_s = 3.0;
  double mismatch_factor = 0.5;
};

void validate_params(const DecisionParams& params);

/// Weight of one buffered detection: confidence, decayed linearly to zero
/// over the horizon, halved (by mismatch_factor) when the detected pictogram
/// contradicts the map. Negative age is a contract violation.
double detection_weight(double confidence, double age_s, bool pictogram_matches,
                        const DecisionParams& params);

/// Buffers keyed by light id. std::map keeps iteration deterministic.
using BufferMap = std::map<std::string, LightBuffer>;

/// Appends the associated detection to its light's buffer, creating the
/// buffer on first use. Unknown light ids are errors.
void push_association(BufferMap& buffers, const Association& assoc, const Detection& det,
                      const HdMap& map, const DecisionParams& params);

struct LightStateEstimate {
  SignalState state = SignalState::unknown;
  double weight = 0.0;  // cumulative weight of the winning state
};

/// State whose entries carry the greatest cumulative weight. Entries vote by
/// detected state only; the detected pictogram merely halves the weight when
/// it contradicts `map_pictogram` (the map is authoritative). Ties go to the
/// state with the most recent contributing entry, then to the more
/// restrictive state (red > red_yellow > yellow > green > off). Empty or
/// fully decayed buffers give (unknown, 0).
LightStateEstimate light_state(const LightBuffer& buffer, std::int64_t now_ns,
                               Pictogram map_pictogram, const DecisionParams& params);

struct GroupDecision {
  std::string group_id;
  SignalState state = SignalState::unknown;
  double confidence = 0.0;  // winning cumulative weight of the determining light
  std::optional<std::string> determining_light;
};

/// The member light with the highest winning weight determines the group's
/// state. All members unknown -> (unknown, 0, none).
GroupDecision group_state(const SignalGroup& group, const BufferMap& buffers,
                          std::int64_t now_ns, const HdMap& map, const DecisionParams& params);

/// Planner-facing state: unknown conservatively maps to red, everything else
/// (including off) passes through.
SignalState planner_state(SignalState state);
SignalState planner_state(const GroupDecision& decision);

/// Distance needed to come to a halt: reaction travel plus braking distance.
double stopping_distance(double speed_mps, double max_decel_mps2, double reaction_latency_s);

/// True iff the vehicle can stop before the stop line.
bool stop_feasible(double speed_mps, double distance_to_stop_line_m, double max_decel_mps2,
                   double reaction_latency_s);

/// One line of the decision trace (NDJSON):
/// {"t": ns, "group": id, "state": str, "confidence": float,
///  "determining_light": id|null}
struct DecisionRecord {
  std::int64_t t = 0;
  std::string group;
  SignalState state = SignalState::unknown;
  double confidence = 0.0;
  std::optional<std::string> determining_light;
};

std::string to_ndjson(const DecisionRecord& record);

}  // namespace tlp

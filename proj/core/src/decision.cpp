#include "tlp/decision.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tlp/errors.hpp"

namespace tlp {

LightBuffer::LightBuffer(std::string light_id, int capacity)
    : light_id_(std::move(light_id)), capacity_(capacity) {
  if (capacity_ < 1) throw ValidationError("buffer capacity must be >= 1");
}

void LightBuffer::push(const BufferEntry& entry) {
  entries_.push_back(entry);
  if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
}

void validate_params(const DecisionParams& params) {
  if (params.buffer_capacity < 1) throw ValidationError("buffer capacity must be >= 1");
  if (!(params.decay_horizon_s > 0.0)) throw ValidationError("decay horizon must be positive");
  if (!(params.mismatch_factor > 0.0 && params.mismatch_factor <= 1.0)) {
    throw ValidationError("mismatch factor must lie in (0, 1]");
  }
}

double detection_weight(double confidence, double age_s, bool pictogram_matches,
                        const DecisionParams& params) {
  if (age_s < 0.0) throw ValidationError("detection age must be non-negative");
  const double decay = std::max(0.0, 1.0 - age_s / params.decay_horizon_s);
  const double penalty = pictogram_matches ? 1.0 : params.mismatch_factor;
  return confidence * decay * penalty;
}

void push_association(BufferMap& buffers, const Association& assoc, const Detection& det,
                      const HdMap& map, const DecisionParams& params) {
  if (map.find_light(assoc.light_id) == nullptr) {
    throw ValidationError("association references unknown light '" + assoc.light_id + "'");
  }
  auto it = buffers.find(assoc.light_id);
  if (it == buffers.end()) {
    it = buffers.emplace(assoc.light_id, LightBuffer(assoc.light_id, params.buffer_capacity))
             .first;
  }
  it->second.push(BufferEntry{det.timestamp_ns, det.cls, det.confidence, det.camera_id});
}

namespace {

// Tie order: more restrictive wins. red > red_yellow > yellow > green > off.
int restrictiveness(SignalState s) {
  switch (s) {
    case SignalState::red: return 4;
    case SignalState::red_yellow: return 3;
    case SignalState::yellow: return 2;
    case SignalState::green: return 1;
    default: return 0;
  }
}

}  // namespace

LightStateEstimate light_state(const LightBuffer& buffer, std::int64_t now_ns,
                               Pictogram map_pictogram, const DecisionParams& params) {
  struct Candidate {
    double weight = 0.0;
    std::int64_t last_contribution_ns = 0;
  };
  std::map<SignalState, Candidate> candidates;

  for (const auto& entry : buffer.entries()) {
    const double age_s = static_cast<double>(now_ns - entry.timestamp_ns) / 1e9;
    // Detected pictogram only modulates the weight; off-class detections make
    // no pictogram claim and take no penalty.
    const auto detected_pictogram = pictogram_of(entry.cls);
    const bool matches = !detected_pictogram || *detected_pictogram == map_pictogram;
    const double w = detection_weight(entry.confidence, age_s, matches, params);
    if (w <= 0.0) continue;
    Candidate& c = candidates[state_of(entry.cls)];
    c.weight += w;
    c.last_contribution_ns = std::max(c.last_contribution_ns, entry.timestamp_ns);
  }

  LightStateEstimate best;
  std::int64_t best_last = 0;
  for (const auto& [state, cand] : candidates) {
    const bool wins =
        cand.weight > best.weight ||
        (cand.weight == best.weight &&
         (cand.last_contribution_ns > best_last ||
          (cand.last_contribution_ns == best_last &&
           restrictiveness(state) > restrictiveness(best.state))));
    if (best.state == SignalState::unknown || wins) {
      best.state = state;
      best.weight = cand.weight;
      best_last = cand.last_contribution_ns;
    }
  }
  return best;
}

GroupDecision group_state(const SignalGroup& group, const BufferMap& buffers,
                          std::int64_t now_ns, const HdMap& map, const DecisionParams& params) {
  GroupDecision decision;
  decision.group_id = group.id;

  for (const auto& member_id : group.members) {
    const MappedTrafficLight* light = map.find_light(member_id);
    if (light == nullptr) {
      throw ValidationError("group '" + group.id + "' references unknown light '" + member_id +
                            "'");
    }
    const auto it = buffers.find(member_id);
    if (it == buffers.end()) continue;
    const LightStateEstimate estimate = light_state(it->second, now_ns, light->pictogram, params);
    if (estimate.state == SignalState::unknown) continue;
    // First member in group order wins weight ties, keeping replays stable.
    if (estimate.weight > decision.confidence || !decision.determining_light) {
      decision.state = estimate.state;
      decision.confidence = estimate.weight;
      decision.determining_light = member_id;
    }
  }
  return decision;
}

SignalState planner_state(SignalState state) {
  return state == SignalState::unknown ? SignalState::red : state;
}

SignalState planner_state(const GroupDecision& decision) { return planner_state(decision.state); }

double stopping_distance(double speed_mps, double max_decel_mps2, double reaction_latency_s) {
  if (speed_mps < 0.0) throw ValidationError("speed must be non-negative");
  if (!(max_decel_mps2 > 0.0)) throw ValidationError("deceleration must be positive");
  if (reaction_latency_s < 0.0) throw ValidationError("reaction latency must be non-negative");
  return speed_mps * reaction_latency_s + speed_mps * speed_mps / (2.0 * max_decel_mps2);
}

bool stop_feasible(double speed_mps, double distance_to_stop_line_m, double max_decel_mps2,
                   double reaction_latency_s) {
  if (distance_to_stop_line_m < 0.0) throw ValidationError("distance must be non-negative");
  return stopping_distance(speed_mps, max_decel_mps2, reaction_latency_s) <=
         distance_to_stop_line_m;
}

std::string to_ndjson(const DecisionRecord& record) {
  nlohmann::json line;
  line["t"] = record.t;
  line["group"] = record.group;
  line["state"] = to_string(record.state);
  line["confidence"] = record.confidence;
  if (record.determining_light) {
    line["determining_light"] = *record.determining_light;
  } else {
    line["determining_light"] = nullptr;
  }
  return line.dump();
}

}  // namespace tlp

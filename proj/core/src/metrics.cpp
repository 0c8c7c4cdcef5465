#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlp/errors.hpp"
#include "tlp/simulator.hpp"

namespace tlp {

namespace {

struct GroupSeries {
  std::vector<const DecisionRecord*> records;  // sorted by t
};

std::map<std::string, GroupSeries> split_by_group(const Trace& trace) {
  std::map<std::string, GroupSeries> series;
  for (const auto& record : trace.decisions) {
    series[record.group].records.push_back(&record);
  }
  for (auto& [group, s] : series) {
    std::stable_sort(s.records.begin(), s.records.end(),
                     [](const DecisionRecord* a, const DecisionRecord* b) { return a->t < b->t; });
  }
  return series;
}

}  // namespace

RunMetrics compute_metrics(const Trace& trace, const Scenario& scenario,
                           const MetricsOptions& options) {
  RunMetrics metrics;
  const auto series = split_by_group(trace);

  // Latency and confirmation counts, per scheduled change of the group that
  // is relevant when the change happens.
  std::vector<double> latencies_ms;
  for (const auto& segment : scenario.relevant) {
    const SignalGroup* group = scenario.map.find_group(segment.group_id);
    const auto it = series.find(segment.group_id);
    for (const std::int64_t change :
         scenario.state_changes(segment.group_id, segment.from_ns, segment.to_ns - 1)) {
      ++metrics.state_changes_observed;
      if (it == series.end()) continue;
      const SignalState new_state = scenario.state_at(segment.group_id, change);
      const DecisionRecord* confirmed = nullptr;
      for (const DecisionRecord* record : it->second.records) {
        if (record->t >= change && record->state == new_state) {
          confirmed = record;
          break;
        }
      }
      if (confirmed == nullptr) continue;
      ++metrics.state_changes_confirmed;
      latencies_ms.push_back(static_cast<double>(confirmed->t - change) / 1e6 +
                             options.latency_offset_ms);

      std::int64_t pushes = 0;
      for (const auto& event : trace.associations) {
        if (event.t < change || event.t > confirmed->t) continue;
        if (std::find(group->members.begin(), group->members.end(), event.light_id) !=
            group->members.end()) {
          ++pushes;
        }
      }
      ++metrics.confirmation_detections[static_cast<int>(pushes)];
    }
  }
  if (!latencies_ms.empty()) {
    double sum = 0.0;
    double mx = 0.0;
    for (const double v : latencies_ms) {
      sum += v;
      mx = std::max(mx, v);
    }
    metrics.mean_state_change_latency_ms = sum / static_cast<double>(latencies_ms.size());
    metrics.max_state_change_latency_ms = mx;
  }

  // Flicker: the then-relevant group switches into a state that contradicts
  // its schedule, with no scheduled change within the window. Switches back
  // to the scheduled state are recoveries, not flicker, so a one-tick blip
  // counts once; unknown transitions are absence of a prediction and never
  // count.
  const auto window_ns = static_cast<std::int64_t>(options.flicker_window_ms * 1e6);
  for (const auto& [group_id, s] : series) {
    for (std::size_t i = 1; i < s.records.size(); ++i) {
      const DecisionRecord& prev = *s.records[i - 1];
      const DecisionRecord& cur = *s.records[i];
      if (cur.state == prev.state) continue;
      if (cur.state == SignalState::unknown || prev.state == SignalState::unknown) continue;
      const auto relevant_prev = scenario.relevant_group_at(prev.t);
      const auto relevant_cur = scenario.relevant_group_at(cur.t);
      if (relevant_prev != group_id || relevant_cur != group_id) continue;
      if (cur.state == scenario.state_at(group_id, cur.t)) continue;
      const auto nearby =
          scenario.state_changes(group_id, cur.t - window_ns - 1, cur.t + window_ns);
      if (nearby.empty()) ++metrics.flicker_count;
    }
  }

  // Accuracy over ticks where the relevant group is within range of its stop
  // line. Distances use the scripted (true) trajectory.
  std::int64_t in_range = 0;
  std::int64_t correct = 0;
  for (const auto& record : trace.decisions) {
    const auto relevant = scenario.relevant_group_at(record.t);
    if (!relevant || *relevant != record.group) continue;
    const SignalGroup* group = scenario.map.find_group(record.group);
    const double distance = (scenario.pose_at(record.t).position - group->stop_line).norm();
    if (distance > options.accuracy_range_m) continue;
    ++in_range;
    if (record.state == scenario.state_at(record.group, record.t)) ++correct;
  }
  metrics.ticks_in_range = in_range;
  if (in_range > 0) {
    metrics.accuracy_within_range = static_cast<double>(correct) / static_cast<double>(in_range);
  }

  // Stop-line distance at the first non-unknown decision of each group.
  for (const auto& [group_id, s] : series) {
    const SignalGroup* group = scenario.map.find_group(group_id);
    if (group == nullptr) continue;
    for (const DecisionRecord* record : s.records) {
      if (record->state == SignalState::unknown) continue;
      metrics.first_association_distance_m[group_id] =
          (scenario.pose_at(record->t).position - group->stop_line).norm();
      break;
    }
  }

  return metrics;
}

std::string metrics_to_json(const RunMetrics& metrics,
                            const std::optional<AssociationComparison>& comparison) {
  nlohmann::json doc;
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  doc["mean_state_change_latency_ms"] = opt(metrics.mean_state_change_latency_ms);
  doc["max_state_change_latency_ms"] = opt(metrics.max_state_change_latency_ms);
  doc["flicker_count"] = metrics.flicker_count;
  doc["accuracy_within_range"] = opt(metrics.accuracy_within_range);
  doc["first_association_distance_m"] = nlohmann::json::object();
  for (const auto& [group, distance] : metrics.first_association_distance_m) {
    doc["first_association_distance_m"][group] = distance;
  }
  doc["confirmation_detections"] = nlohmann::json::object();
  for (const auto& [count, occurrences] : metrics.confirmation_detections) {
    doc["confirmation_detections"][std::to_string(count)] = occurrences;
  }
  doc["state_changes_observed"] = metrics.state_changes_observed;
  doc["state_changes_confirmed"] = metrics.state_changes_confirmed;
  doc["ticks_in_range"] = metrics.ticks_in_range;
  if (comparison) {
    doc["association_comparison"] = {
        {"ticks", comparison->ticks},
        {"hungarian_misassociations", comparison->hungarian_misassociations},
        {"nearest_misassociations", comparison->nearest_misassociations},
        {"hungarian_misassociation_ticks", comparison->hungarian_misassociation_ticks},
        {"nearest_misassociation_ticks", comparison->nearest_misassociation_ticks},
    };
  }
  return doc.dump(2);
}

}  // namespace tlp

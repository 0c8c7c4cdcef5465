#include "tlp/hdmap.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json_util.hpp"
#include "tlp/errors.hpp"

namespace tlp {

using jsonu::json;

bool operator==(const MappedTrafficLight& a, const MappedTrafficLight& b) {
  return a.id == b.id && a.position == b.position && a.pictogram == b.pictogram &&
         a.group_id == b.group_id;
}

bool operator==(const V2xIds& a, const V2xIds& b) {
  return a.intersection == b.intersection && a.signal_phase == b.signal_phase;
}

bool operator==(const SignalGroup& a, const SignalGroup& b) {
  return a.id == b.id && a.members == b.members && a.stop_line == b.stop_line && a.v2x == b.v2x;
}

bool operator==(const HdMap& a, const HdMap& b) {
  return a.lights() == b.lights() && a.groups() == b.groups();
}

std::vector<std::string> map_violations(const std::vector<MappedTrafficLight>& lights,
                                        const std::vector<SignalGroup>& groups) {
  std::vector<std::string> violations;
  std::unordered_set<std::string> light_ids;
  std::unordered_set<std::string> group_ids;

  for (const auto& light : lights) {
    if (light.id.empty()) violations.push_back("light with empty id");
    if (!light_ids.insert(light.id).second) {
      violations.push_back("duplicate light id '" + light.id + "'");
    }
  }
  for (const auto& group : groups) {
    if (group.id.empty()) violations.push_back("group with empty id");
    if (!group_ids.insert(group.id).second) {
      violations.push_back("duplicate group id '" + group.id + "'");
    }
    if (group.members.empty()) {
      violations.push_back("group '" + group.id + "' has no members");
    }
    for (const auto& member : group.members) {
      if (!light_ids.count(member)) {
        violations.push_back("group '" + group.id + "' references nonexistent light '" + member +
                             "'");
      }
    }
  }
  for (const auto& light : lights) {
    if (!group_ids.count(light.group_id)) {
      violations.push_back("light '" + light.id + "' references nonexistent group '" +
                           light.group_id + "'");
      continue;
    }
    for (const auto& group : groups) {
      if (group.id != light.group_id) continue;
      bool listed = false;
      for (const auto& member : group.members) listed |= (member == light.id);
      if (!listed) {
        violations.push_back("light '" + light.id + "' names group '" + light.group_id +
                             "' which does not list it as a member");
      }
    }
  }
  return violations;
}

HdMap::HdMap(std::vector<MappedTrafficLight> lights, std::vector<SignalGroup> groups)
    : lights_(std::move(lights)), groups_(std::move(groups)) {
  const auto violations = map_violations(lights_, groups_);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid HD map:";
    for (const auto& v : violations) msg << "\n  - " << v;
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < lights_.size(); ++i) light_index_[lights_[i].id] = i;
  for (std::size_t i = 0; i < groups_.size(); ++i) group_index_[groups_[i].id] = i;
}

const MappedTrafficLight* HdMap::find_light(std::string_view id) const {
  const auto it = light_index_.find(std::string(id));
  return it == light_index_.end() ? nullptr : &lights_[it->second];
}

const SignalGroup* HdMap::find_group(std::string_view id) const {
  const auto it = group_index_.find(std::string(id));
  return it == group_index_.end() ? nullptr : &groups_[it->second];
}

namespace {

MappedTrafficLight light_from_json(const json& j, const std::string& ctx) {
  MappedTrafficLight light;
  light.id = jsonu::require_string(j, "id", ctx);
  light.position = jsonu::require_vec3(j, "position", ctx);
  light.pictogram = pictogram_from_string(jsonu::require_string(j, "pictogram", ctx));
  light.group_id = jsonu::require_string(j, "group", ctx);
  return light;
}

SignalGroup group_from_json(const json& j, const std::string& ctx) {
  SignalGroup group;
  group.id = jsonu::require_string(j, "id", ctx);
  const json& members = jsonu::require(j, "members", ctx);
  if (!members.is_array()) throw ParseError(ctx + ": field 'members' must be an array");
  for (const auto& m : members) {
    if (!m.is_string()) throw ParseError(ctx + ": 'members' entries must be strings");
    group.members.push_back(m.get<std::string>());
  }
  group.stop_line = jsonu::require_vec3(j, "stop_line", ctx);
  if (j.contains("v2x") && !j.at("v2x").is_null()) {
    const json& v2x = j.at("v2x");
    group.v2x = V2xIds{jsonu::require_string(v2x, "intersection", ctx + ".v2x"),
                       jsonu::require_string(v2x, "signal_phase", ctx + ".v2x")};
  }
  return group;
}

MapDocument document_from_json(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source + ": map document must be a JSON object");
  MapDocument result;
  const json& jlights = jsonu::require(doc, "lights", source);
  if (!jlights.is_array()) throw ParseError(source + ": 'lights' must be an array");
  for (std::size_t i = 0; i < jlights.size(); ++i) {
    result.lights.push_back(
        light_from_json(jlights[i], source + ": lights[" + std::to_string(i) + "]"));
  }
  const json& jgroups = jsonu::require(doc, "groups", source);
  if (!jgroups.is_array()) throw ParseError(source + ": 'groups' must be an array");
  for (std::size_t i = 0; i < jgroups.size(); ++i) {
    result.groups.push_back(
        group_from_json(jgroups[i], source + ": groups[" + std::to_string(i) + "]"));
  }
  return result;
}

}  // namespace

MapDocument parse_map_document(std::string_view text, std::string_view source_name) {
  return document_from_json(jsonu::parse_text(text, source_name), std::string(source_name));
}

MapDocument load_map_document(const std::filesystem::path& path) {
  return document_from_json(jsonu::load_file(path), path.string());
}

HdMap parse_map(std::string_view text, std::string_view source_name) {
  MapDocument doc = parse_map_document(text, source_name);
  return HdMap(std::move(doc.lights), std::move(doc.groups));
}

HdMap load_map(const std::filesystem::path& path) {
  MapDocument doc = load_map_document(path);
  return HdMap(std::move(doc.lights), std::move(doc.groups));
}

std::string map_to_json(const HdMap& map) {
  json doc;
  doc["lights"] = json::array();
  for (const auto& light : map.lights()) {
    doc["lights"].push_back({{"id", light.id},
                             {"position", jsonu::vec3_to_json(light.position)},
                             {"pictogram", to_string(light.pictogram)},
                             {"group", light.group_id}});
  }
  doc["groups"] = json::array();
  for (const auto& group : map.groups()) {
    json jgroup = {{"id", group.id},
                   {"members", group.members},
                   {"stop_line", jsonu::vec3_to_json(group.stop_line)}};
    if (group.v2x) {
      jgroup["v2x"] = {{"intersection", group.v2x->intersection},
                       {"signal_phase", group.v2x->signal_phase}};
    } else {
      jgroup["v2x"] = nullptr;
    }
    doc["groups"].push_back(std::move(jgroup));
  }
  return doc.dump(2);
}

void save_map(const HdMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << map_to_json(map) << '\n';
}

std::vector<const MappedTrafficLight*> lights_in_region(const HdMap& map,
                                                        const Eigen::Vector3d& position,
                                                        const Eigen::Vector3d& heading,
                                                        double range_m) {
  if (!(range_m > 0.0)) throw ValidationError("region range must be positive");
  const double norm = heading.norm();
  if (!(norm > 0.0)) throw ValidationError("ego heading must be non-zero");
  const Eigen::Vector3d forward = heading / norm;

  std::vector<const MappedTrafficLight*> result;
  for (const auto& light : map.lights()) {
    const Eigen::Vector3d delta = light.position - position;
    const double ahead = delta.dot(forward);
    if (ahead > 0.0 && ahead <= range_m && delta.norm() <= range_m) {
      result.push_back(&light);
    }
  }
  return result;
}

}  // namespace tlp

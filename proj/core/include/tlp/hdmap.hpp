#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tlp/light_class.hpp"

namespace tlp {

struct MappedTrafficLight {
  std::string id;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // world frame, meters
  Pictogram pictogram = Pictogram::circle;
  std::string group_id;
};

struct V2xIds {
  std::string intersection;
  std::string signal_phase;
};

/// Lights that collectively control one traffic movement. Members always
/// display the same state; their pictograms may differ (overhead vs pole).
/// The stop line anchors distance-to-intersection and braking checks.
struct SignalGroup {
  std::string id;
  std::vector<std::string> members;
  Eigen::Vector3d stop_line = Eigen::Vector3d::Zero();
  std::optional<V2xIds> v2x;
};

bool operator==(const MappedTrafficLight& a, const MappedTrafficLight& b);
bool operator==(const V2xIds& a, const V2xIds& b);
bool operator==(const SignalGroup& a, const SignalGroup& b);

/// Immutable, validated map of traffic lights and signal groups. Safe to
/// share freely across threads once constructed.
class HdMap {
 public:
  HdMap() = default;

  /// Validates all invariants eagerly; throws ValidationError listing every
  /// violation found.
  HdMap(std::vector<MappedTrafficLight> lights, std::vector<SignalGroup> groups);

  const std::vector<MappedTrafficLight>& lights() const { return lights_; }
  const std::vector<SignalGroup>& groups() const { return groups_; }

  const MappedTrafficLight* find_light(std::string_view id) const;
  const SignalGroup* find_group(std::string_view id) const;

 private:
  std::vector<MappedTrafficLight> lights_;
  std::vector<SignalGroup> groups_;
  std::unordered_map<std::string, std::size_t> light_index_;
  std::unordered_map<std::string, std::size_t> group_index_;
};

bool operator==(const HdMap& a, const HdMap& b);

/// Every invariant violation of a candidate map, one message per finding:
/// duplicate ids, dangling references, empty groups, lights whose group does
/// not list them back.
std::vector<std::string> map_violations(const std::vector<MappedTrafficLight>& lights,
                                        const std::vector<SignalGroup>& groups);

/// Raw parsed map content, prior to invariant validation. Lets tooling report
/// every violation of a broken map instead of failing on the first.
struct MapDocument {
  std::vector<MappedTrafficLight> lights;
  std::vector<SignalGroup> groups;
};

MapDocument parse_map_document(std::string_view text, std::string_view source_name);
MapDocument load_map_document(const std::filesystem::path& path);

HdMap load_map(const std::filesystem::path& path);
HdMap parse_map(std::string_view text, std::string_view source_name);
void save_map(const HdMap& map, const std::filesystem::path& path);
std::string map_to_json(const HdMap& map);

/// Lights ahead of the ego pose: forward distance along `heading` in
/// (0, range] and Euclidean distance <= range. Pointers stay valid as long
/// as the map does; order follows the map's light order.
std::vector<const MappedTrafficLight*> lights_in_region(const HdMap& map,
                                                        const Eigen::Vector3d& position,
                                                        const Eigen::Vector3d& heading,
                                                        double range_m = 180.0);

}  // namespace tlp

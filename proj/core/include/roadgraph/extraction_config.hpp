#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace roadgraph {

struct ProximityBand {
  std::string relation;
  double max_distance = 0;  // feet, inclusive
  bool operator==(const ProximityBand&) const = default;
};

// Half-open bearing interval [min_deg, max_deg) inside [-180, 180).
struct DirectionalSector {
  std::string relation;
  double min_deg = 0;
  double max_deg = 0;
  bool operator==(const DirectionalSector&) const = default;
};

// An unordered actor-type pair. `relations`, when non-empty, restricts the
// pair to the listed relations (e.g. lights only get Visible).
struct ActorPairRule {
  std::string first;
  std::string second;
  std::vector<std::string> relations;

  bool matches(const std::string& a, const std::string& b) const {
    return (a == first && b == second) || (a == second && b == first);
  }
  bool allows(const std::string& relation) const;
  bool operator==(const ActorPairRule&) const = default;
};

// Graph construction settings. JSON keys follow the scene-graph config:
// actor_names, relation_names, <type>_names alias lists, proximity_thresholds,
// proximity_relation_list, directional_thresholds, directional_relation_list,
// lane_threshold, plus the extensions lane_overlap_margin, ego_only,
// cumulative_proximity, directional_max_distance and lane_actor_names.
struct ExtractionConfig {
  std::vector<std::string> actor_names;
  std::vector<std::string> relation_names;
  std::map<std::string, std::vector<std::string>> class_aliases;  // actor -> labels
  std::vector<ProximityBand> proximity_thresholds;
  std::vector<ActorPairRule> proximity_relation_list;
  std::vector<DirectionalSector> directional_thresholds;
  std::vector<ActorPairRule> directional_relation_list;
  double directional_max_distance = 16.0;
  double lane_threshold = 6.0;
  double lane_overlap_margin = 1.5;
  bool ego_only = false;
  bool cumulative_proximity = true;
  std::vector<std::string> lane_actor_names;

  static ExtractionConfig defaults();
  static ExtractionConfig load(const std::filesystem::path& path);
  // Missing keys fall back to defaults().
  static ExtractionConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  // Throws ConfigError on broken invariants (increasing thresholds, sector
  // partition, positive lane threshold, unknown relation/actor names).
  void validate() const;

  int relation_index(const std::string& relation) const;  // -1 when absent
  bool operator==(const ExtractionConfig&) const = default;
};

inline constexpr const char* kRelationIsIn = "isIn";
inline constexpr const char* kEgoLabel = "ego_car";
inline constexpr const char* kLeftLane = "left_lane";
inline constexpr const char* kMiddleLane = "middle_lane";
inline constexpr const char* kRightLane = "right_lane";

enum class RelationKind { kBelonging, kProximity, kDirectional, kOther };
RelationKind relation_kind(const ExtractionConfig& cfg, const std::string& relation);

}  // namespace roadgraph

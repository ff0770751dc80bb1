#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roadgraph/dataset.hpp"
#include "roadgraph/extraction_config.hpp"

namespace roadgraph {

struct NodeAttributes {
  std::string source_id;  // empty for ego and lane nodes
  std::array<double, 3> position{};
  std::optional<double> yaw;
  std::array<double, 2> velocity{};
  std::optional<LightStatus> light;
  std::optional<double> sign;
  bool elevated = false;  // projected light/sign detections

  bool operator==(const NodeAttributes&) const = default;
};

struct SceneGraphNode {
  int node_id = 0;
  std::string label;  // "ego_car", "left_lane", "car_1", ...
  std::string actor_type;
  NodeAttributes attributes;

  bool operator==(const SceneGraphNode&) const = default;
};

struct SceneGraphEdge {
  int src = 0;
  int dst = 0;
  std::string relation;

  auto operator<=>(const SceneGraphEdge&) const = default;
};

// Node order is fixed: ego (0), left/middle/right lanes (1..3), then actors.
struct SceneGraph {
  std::int64_t frame_index = 0;
  std::vector<SceneGraphNode> nodes;
  std::vector<SceneGraphEdge> edges;

  std::size_t node_count() const { return nodes.size(); }
  bool operator==(const SceneGraph&) const = default;
};

inline constexpr int kEgoNode = 0;
inline constexpr int kLeftLaneNode = 1;
inline constexpr int kMiddleLaneNode = 2;
inline constexpr int kRightLaneNode = 3;

struct SceneGraphClip {
  std::string clip_id;
  std::optional<int> label;
  std::map<std::string, std::string> metadata;
  std::vector<SceneGraph> graphs;

  bool operator==(const SceneGraphClip&) const = default;
};

// Extracted graphs plus the configuration that produced them, so relation
// and actor vocabularies travel with the data.
struct SceneGraphDataset {
  std::string name;
  ExtractionConfig config;
  std::map<std::string, std::string> metadata;
  std::vector<SceneGraphClip> clips;

  std::vector<int> labels() const;  // throws LabelMissing
  SceneGraphDataset subset(const std::vector<std::size_t>& indices) const;
  const SceneGraphClip* find_clip(const std::string& clip_id) const;
  bool operator==(const SceneGraphDataset&) const = default;
};

inline constexpr const char* kSceneGraphFormat = "sgd.v1";

// JSONL container: a header line followed by one line per clip.
void save_scenegraph_dataset(const SceneGraphDataset& dataset, const std::filesystem::path& path);
SceneGraphDataset load_scenegraph_dataset(const std::filesystem::path& path);
std::string format_scenegraph_dataset(const SceneGraphDataset& dataset);
SceneGraphDataset parse_scenegraph_dataset(const std::string& text);

// Graphviz DOT text. Nodes are labelled "label:actor_type"; edges carry the
// relation as label and a colour per relation kind.
std::string export_dot(const SceneGraph& graph,
                       const ExtractionConfig& cfg = ExtractionConfig::defaults());

}  // namespace roadgraph

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roadgraph/bev.hpp"
#include "roadgraph/dataset.hpp"
#include "roadgraph/extraction_config.hpp"
#include "roadgraph/scenegraph.hpp"

namespace roadgraph {

// Alias lookup: exact match first, then case-insensitive. Throws
// UnknownActorClass when no alias list contains the label.
std::string resolve_actor_type(const std::string& class_label, const ExtractionConfig& cfg);

// Proximity relations for an allowed pair, in threshold order. Each returned
// relation stands for the two directed edges a->b and b->a. Empty when the
// type pair is not listed.
std::vector<std::string> proximity_relations(const ObjectState& a, const ObjectState& b,
                                             const ExtractionConfig& cfg);

// Bearing of `other` seen from `from`, degrees in [-180, 180): 0 is dead
// ahead, +90 due right. `from.yaw` rotates the frame; absent yaw counts as 0.
double relative_bearing(const ObjectState& from, const ObjectState& other);

// Sector label of `other` seen from `from`, when the pair is listed and
// within directional_max_distance.
std::optional<std::string> directional_relation(const ObjectState& from, const ObjectState& other,
                                                const ExtractionConfig& cfg);

// Lane node labels for a vehicle from its lateral offset.
std::vector<std::string> lane_membership(const ObjectState& obj, const ExtractionConfig& cfg);

struct FrameExtraction {
  SceneGraph graph;
  std::vector<std::string> warnings;
};

// Objects must already be in ego-frame feet. An object with id "ego" only
// supplies the ego node's attributes.
FrameExtraction extract_graph(const std::vector<ObjectState>& objects, std::int64_t frame_index,
                              const ExtractionConfig& cfg);

struct ProjectedFrame {
  std::vector<ObjectState> objects;
  std::vector<std::string> warnings;
  std::vector<bool> elevated;  // parallel to objects
};

// Image pipeline: resolves detection classes and projects them to the
// ground plane. Unknown classes and out-of-region contact points are
// skipped with a warning.
ProjectedFrame project_detections(const std::vector<Detection>& detections,
                                  const BevCalibration& cal, const ExtractionConfig& cfg);

FrameExtraction extract_frame(const FrameRecord& frame, const ExtractionConfig& cfg,
                              const BevCalibration* cal = nullptr);

struct SequenceExtraction {
  std::vector<SceneGraph> graphs;
  std::vector<std::string> warnings;
};

SequenceExtraction extract_sequence(const Clip& clip, const ExtractionConfig& cfg,
                                    const BevCalibration* cal = nullptr);

SceneGraphDataset extract_dataset(const Dataset& dataset, const ExtractionConfig& cfg,
                                  const BevCalibration* cal = nullptr,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace roadgraph

#include "roadgraph/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double ground_distance(const ObjectState& a, const ObjectState& b) {
  return std::hypot(a.position[0] - b.position[0], a.position[1] - b.position[1]);
}

const ActorPairRule* find_rule(const std::vector<ActorPairRule>& rules, const std::string& a,
                               const std::string& b) {
  for (const auto& rule : rules) {
    if (rule.matches(a, b)) return &rule;
  }
  return nullptr;
}

bool is_lane_actor(const std::string& type, const ExtractionConfig& cfg) {
  return std::find(cfg.lane_actor_names.begin(), cfg.lane_actor_names.end(), type) !=
         cfg.lane_actor_names.end();
}

int lane_node(const std::string& label) {
  if (label == kLeftLane) return kLeftLaneNode;
  if (label == kRightLane) return kRightLaneNode;
  return kMiddleLaneNode;
}

class EdgeSink {
 public:
  explicit EdgeSink(std::vector<SceneGraphEdge>& edges) : edges_(edges) {}
  void add(int src, int dst, const std::string& relation) {
    if (src == dst) return;
    if (seen_.insert({src, dst, relation}).second) edges_.push_back({src, dst, relation});
  }

 private:
  std::vector<SceneGraphEdge>& edges_;
  std::set<std::tuple<int, int, std::string>> seen_;
};

}  // namespace

std::string resolve_actor_type(const std::string& class_label, const ExtractionConfig& cfg) {
  if (class_label.empty()) raise(ErrorCode::kUnknownActorClass, "empty class label");
  for (const auto& actor : cfg.actor_names) {
    const auto it = cfg.class_aliases.find(actor);
    if (it == cfg.class_aliases.end()) continue;
    if (std::find(it->second.begin(), it->second.end(), class_label) != it->second.end()) return actor;
  }
  const auto wanted = lower(class_label);
  for (const auto& actor : cfg.actor_names) {
    const auto it = cfg.class_aliases.find(actor);
    if (it == cfg.class_aliases.end()) continue;
    for (const auto& alias : it->second) {
      if (lower(alias) == wanted) return actor;
    }
  }
  raise(ErrorCode::kUnknownActorClass, "no alias list contains '" + class_label + "'");
}

std::vector<std::string> proximity_relations(const ObjectState& a, const ObjectState& b,
                                             const ExtractionConfig& cfg) {
  std::vector<std::string> out;
  const auto* rule = find_rule(cfg.proximity_relation_list, a.actor_type, b.actor_type);
  if (rule == nullptr) return out;
  const double d = ground_distance(a, b);
  for (const auto& band : cfg.proximity_thresholds) {
    if (d <= band.max_distance && rule->allows(band.relation)) {
      out.push_back(band.relation);
      if (!cfg.cumulative_proximity) break;
    }
  }
  return out;
}

double relative_bearing(const ObjectState& from, const ObjectState& other) {
  const double dx = other.position[0] - from.position[0];
  const double dy = other.position[1] - from.position[1];
  double theta = std::atan2(dx, dy) * 180.0 / std::numbers::pi - from.yaw.value_or(0.0);
  theta = std::fmod(theta + 180.0, 360.0);
  if (theta < 0) theta += 360.0;
  theta -= 180.0;
  if (theta >= 180.0) theta -= 360.0;
  return theta;
}

std::optional<std::string> directional_relation(const ObjectState& from, const ObjectState& other,
                                                const ExtractionConfig& cfg) {
  const auto* rule = find_rule(cfg.directional_relation_list, from.actor_type, other.actor_type);
  if (rule == nullptr) return std::nullopt;
  if (ground_distance(from, other) > cfg.directional_max_distance) return std::nullopt;
  const double theta = relative_bearing(from, other);
  for (const auto& sector : cfg.directional_thresholds) {
    if (theta >= sector.min_deg && theta < sector.max_deg && rule->allows(sector.relation)) {
      return sector.relation;
    }
  }
  return std::nullopt;
}

std::vector<std::string> lane_membership(const ObjectState& obj, const ExtractionConfig& cfg) {
  const double d = obj.position[0];
  const double magnitude = std::abs(d);
  const char* side = d >= 0 ? kRightLane : kLeftLane;
  if (std::abs(magnitude - cfg.lane_threshold) <= cfg.lane_overlap_margin) {
    return {kMiddleLane, side};
  }
  if (magnitude <= cfg.lane_threshold) return {kMiddleLane};
  return {side};
}

FrameExtraction extract_graph(const std::vector<ObjectState>& objects, std::int64_t frame_index,
                              const ExtractionConfig& cfg) {
  FrameExtraction result;
  SceneGraph& g = result.graph;
  g.frame_index = frame_index;

  ObjectState ego{"ego", "car", {0, 0, 0}, 0.0, {0, 0}, {}, {}, {}};
  std::vector<ObjectState> actors;
  for (const auto& obj : objects) {
    for (double p : obj.position) {
      if (!std::isfinite(p)) raise(ErrorCode::kParseError, "object '" + obj.id + "' has a non-finite position");
    }
    if (obj.id == "ego") {
      ego.velocity = obj.velocity;
      continue;
    }
    ObjectState resolved = obj;
    try {
      resolved.actor_type = resolve_actor_type(obj.actor_type, cfg);
    } catch (const Error& e) {
      result.warnings.push_back("frame " + std::to_string(frame_index) + ": skipped '" + obj.id +
                                "': " + e.what());
      continue;
    }
    if (resolved.actor_type == "lane") {
      result.warnings.push_back("frame " + std::to_string(frame_index) + ": skipped lane object '" +
                                obj.id + "' (lane nodes are fixed)");
      continue;
    }
    actors.push_back(std::move(resolved));
  }
  std::stable_sort(actors.begin(), actors.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });

  auto make_node = [](int id, std::string label, std::string type, const ObjectState* src) {
    SceneGraphNode node{id, std::move(label), std::move(type), {}};
    if (src != nullptr) {
      node.attributes.source_id = src->id == "ego" ? "" : src->id;
      node.attributes.position = src->position;
      node.attributes.yaw = src->yaw;
      node.attributes.velocity = src->velocity;
      node.attributes.light = src->light;
      node.attributes.sign = src->sign;
    }
    return node;
  };
  g.nodes.push_back(make_node(kEgoNode, kEgoLabel, "car", &ego));
  g.nodes.push_back(make_node(kLeftLaneNode, kLeftLane, "lane", nullptr));
  g.nodes.push_back(make_node(kMiddleLaneNode, kMiddleLane, "lane", nullptr));
  g.nodes.push_back(make_node(kRightLaneNode, kRightLane, "lane", nullptr));
  std::map<std::string, int> per_type;
  for (const auto& a : actors) {
    const int k = ++per_type[a.actor_type];
    g.nodes.push_back(make_node(static_cast<int>(g.nodes.size()),
                                a.actor_type + "_" + std::to_string(k), a.actor_type, &a));
  }

  EdgeSink sink(g.edges);
  sink.add(kEgoNode, kMiddleLaneNode, kRelationIsIn);
  for (std::size_t i = 0; i < actors.size(); ++i) {
    if (!is_lane_actor(actors[i].actor_type, cfg)) continue;
    const int node = static_cast<int>(i) + 4;
    for (const auto& lane : lane_membership(actors[i], cfg)) sink.add(node, lane_node(lane), kRelationIsIn);
  }

  // Participants in pairwise relations: ego followed by actors, in node order.
  std::vector<const ObjectState*> members{&ego};
  std::vector<int> member_nodes{kEgoNode};
  for (std::size_t i = 0; i < actors.size(); ++i) {
    members.push_back(&actors[i]);
    member_nodes.push_back(static_cast<int>(i) + 4);
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (cfg.ego_only && i != 0) continue;
      const auto& a = *members[i];
      const auto& b = *members[j];
      const int na = member_nodes[i];
      const int nb = member_nodes[j];
      for (const auto& rel : proximity_relations(a, b, cfg)) {
        sink.add(na, nb, rel);
        sink.add(nb, na, rel);
      }
      if (auto rel = directional_relation(a, b, cfg)) sink.add(na, nb, *rel);
      if (auto rel = directional_relation(b, a, cfg)) sink.add(nb, na, *rel);
    }
  }
  return result;
}

ProjectedFrame project_detections(const std::vector<Detection>& detections,
                                  const BevCalibration& cal, const ExtractionConfig& cfg) {
  ProjectedFrame out;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& det = detections[i];
    std::string type;
    try {
      type = resolve_actor_type(det.class_label, cfg);
    } catch (const Error& e) {
      out.warnings.push_back(std::string("skipped detection: ") + e.what());
      continue;
    }
    ProjectedDetection projected;
    try {
      projected = project_detection(det, cal);
    } catch (const Error& e) {
      out.warnings.push_back(std::string("skipped detection: ") + e.what());
      continue;
    }
    char id[32];
    std::snprintf(id, sizeof(id), "det_%03zu", i);
    ObjectState obj;
    obj.id = id;
    obj.actor_type = det.class_label;
    obj.position = {projected.ground.x, projected.ground.y, 0.0};
    out.objects.push_back(std::move(obj));
    out.elevated.push_back(type == "light" || type == "sign");
  }
  return out;
}

FrameExtraction extract_frame(const FrameRecord& frame, const ExtractionConfig& cfg,
                              const BevCalibration* cal) {
  if (frame.is_state()) return extract_graph(frame.objects(), frame.frame_index, cfg);
  if (cal == nullptr) {
    raise(ErrorCode::kConfigError, "image-variant frames need a BEV calibration");
  }
  auto projected = project_detections(frame.detections(), *cal, cfg);
  auto result = extract_graph(projected.objects, frame.frame_index, cfg);
  for (auto& node : result.graph.nodes) {
    for (std::size_t i = 0; i < projected.objects.size(); ++i) {
      if (node.attributes.source_id == projected.objects[i].id) node.attributes.elevated = projected.elevated[i];
    }
  }
  result.warnings.insert(result.warnings.begin(), projected.warnings.begin(), projected.warnings.end());
  return result;
}

SequenceExtraction extract_sequence(const Clip& clip, const ExtractionConfig& cfg,
                                    const BevCalibration* cal) {
  if (clip.frames.empty()) raise(ErrorCode::kEmptyClip, "clip '" + clip.clip_id + "' has no frames");
  SequenceExtraction out;
  out.graphs.reserve(clip.frames.size());
  for (const auto& frame : clip.frames) {
    FrameExtraction fe;
    try {
      fe = extract_frame(frame, cfg, cal);
    } catch (const Error& e) {
      raise(e.code(), "clip '" + clip.clip_id + "' frame_index " + std::to_string(frame.frame_index) +
                          ": " + e.what());
    }
    out.graphs.push_back(std::move(fe.graph));
    for (auto& w : fe.warnings) out.warnings.push_back("clip '" + clip.clip_id + "' " + w);
  }
  return out;
}

SceneGraphDataset extract_dataset(const Dataset& dataset, const ExtractionConfig& cfg,
                                  const BevCalibration* cal, std::vector<std::string>* warnings) {
  SceneGraphDataset out;
  out.name = dataset.name;
  out.config = cfg;
  out.metadata["source_variant"] = to_string(dataset.variant);
  for (const auto& clip : dataset.clips) {
    auto seq = extract_sequence(clip, cfg, cal);
    if (warnings != nullptr) warnings->insert(warnings->end(), seq.warnings.begin(), seq.warnings.end());
    out.clips.push_back({clip.clip_id, clip.label, clip.metadata, std::move(seq.graphs)});
  }
  return out;
}

}  // namespace roadgraph

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/scenegraph.hpp"

namespace roadgraph {

using nlohmann::json;

std::vector<int> SceneGraphDataset::labels() const {
  std::vector<int> out;
  out.reserve(clips.size());
  for (const auto& clip : clips) {
    if (!clip.label) raise(ErrorCode::kLabelMissing, "clip '" + clip.clip_id + "' has no label");
    out.push_back(*clip.label);
  }
  return out;
}

SceneGraphDataset SceneGraphDataset::subset(const std::vector<std::size_t>& indices) const {
  SceneGraphDataset out{name, config, metadata, {}};
  out.clips.reserve(indices.size());
  for (auto i : indices) out.clips.push_back(clips.at(i));
  return out;
}

const SceneGraphClip* SceneGraphDataset::find_clip(const std::string& clip_id) const {
  for (const auto& clip : clips) {
    if (clip.clip_id == clip_id) return &clip;
  }
  return nullptr;
}

namespace {

json node_to_json(const SceneGraphNode& node) {
  const auto& a = node.attributes;
  json attrs = {{"position", {a.position[0], a.position[1], a.position[2]}},
                {"velocity", {a.velocity[0], a.velocity[1]}}};
  if (!a.source_id.empty()) attrs["source_id"] = a.source_id;
  if (a.yaw) attrs["yaw"] = *a.yaw;
  if (a.light) attrs["light"] = to_string(*a.light);
  if (a.sign) attrs["sign"] = *a.sign;
  if (a.elevated) attrs["elevated"] = true;
  return {{"id", node.node_id}, {"label", node.label}, {"actor_type", node.actor_type},
          {"attributes", attrs}};
}

SceneGraphNode node_from_json(const json& j) {
  SceneGraphNode node;
  node.node_id = j.at("id").get<int>();
  node.label = j.at("label").get<std::string>();
  node.actor_type = j.at("actor_type").get<std::string>();
  const auto& attrs = j.at("attributes");
  auto& a = node.attributes;
  for (int i = 0; i < 3; ++i) a.position[i] = attrs.at("position").at(i).get<double>();
  for (int i = 0; i < 2; ++i) a.velocity[i] = attrs.at("velocity").at(i).get<double>();
  if (attrs.contains("source_id")) a.source_id = attrs["source_id"].get<std::string>();
  if (attrs.contains("yaw")) a.yaw = attrs["yaw"].get<double>();
  if (attrs.contains("light")) a.light = parse_light_status(attrs["light"].get<std::string>());
  if (attrs.contains("sign")) a.sign = attrs["sign"].get<double>();
  if (attrs.contains("elevated")) a.elevated = attrs["elevated"].get<bool>();
  return node;
}

json graph_to_json(const SceneGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back(node_to_json(n));
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({e.src, e.dst, e.relation});
  return {{"frame_index", g.frame_index}, {"nodes", nodes}, {"edges", edges}};
}

SceneGraph graph_from_json(const json& j) {
  SceneGraph g;
  g.frame_index = j.at("frame_index").get<std::int64_t>();
  for (const auto& n : j.at("nodes")) g.nodes.push_back(node_from_json(n));
  for (const auto& e : j.at("edges")) {
    SceneGraphEdge edge{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<std::string>()};
    const auto n = static_cast<int>(g.nodes.size());
    if (edge.src < 0 || edge.src >= n || edge.dst < 0 || edge.dst >= n) {
      raise(ErrorCode::kSchemaError, "edge endpoint out of range");
    }
    g.edges.push_back(std::move(edge));
  }
  return g;
}

}  // namespace

std::string format_scenegraph_dataset(const SceneGraphDataset& dataset) {
  std::ostringstream out;
  json header = {{"format", kSceneGraphFormat},
                 {"name", dataset.name},
                 {"metadata", dataset.metadata},
                 {"extraction_config", json::parse(dataset.config.to_json_text())},
                 {"clip_count", dataset.clips.size()}};
  out << header.dump() << '\n';
  for (const auto& clip : dataset.clips) {
    json graphs = json::array();
    for (const auto& g : clip.graphs) graphs.push_back(graph_to_json(g));
    json record = {{"clip_id", clip.clip_id},
                   {"label", clip.label ? json(*clip.label) : json(nullptr)},
                   {"metadata", clip.metadata},
                   {"graphs", graphs}};
    out << record.dump() << '\n';
  }
  return out.str();
}

SceneGraphDataset parse_scenegraph_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::kSchemaError, "empty scene-graph dataset");
  SceneGraphDataset dataset;
  std::size_t expected = 0;
  try {
    const json header = json::parse(line);
    const auto format = header.value("format", std::string());
    if (format != kSceneGraphFormat) {
      raise(ErrorCode::kSchemaError, "unsupported scene-graph dataset version '" + format + "'");
    }
    dataset.name = header.value("name", std::string());
    if (header.contains("metadata")) {
      dataset.metadata = header["metadata"].get<std::map<std::string, std::string>>();
    }
    dataset.config = ExtractionConfig::from_json_text(header.at("extraction_config").dump());
    expected = header.at("clip_count").get<std::size_t>();
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("scene-graph dataset header: ") + e.what());
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json record = json::parse(line);
      SceneGraphClip clip;
      clip.clip_id = record.at("clip_id").get<std::string>();
      if (!record.at("label").is_null()) clip.label = record["label"].get<int>();
      clip.metadata = record.at("metadata").get<std::map<std::string, std::string>>();
      for (const auto& g : record.at("graphs")) clip.graphs.push_back(graph_from_json(g));
      dataset.clips.push_back(std::move(clip));
    } catch (const json::exception& e) {
      raise(ErrorCode::kParseError, "scene-graph dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (dataset.clips.size() != expected) {
    raise(ErrorCode::kSchemaError, "header declares " + std::to_string(expected) + " clips, found " +
                                       std::to_string(dataset.clips.size()));
  }
  return dataset;
}

void save_scenegraph_dataset(const SceneGraphDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIoError, "cannot write " + path.string());
  out << format_scenegraph_dataset(dataset);
}

SceneGraphDataset load_scenegraph_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kNotFound, "scene-graph dataset " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenegraph_dataset(buffer.str());
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_dot(const SceneGraph& graph, const ExtractionConfig& cfg) {
  std::ostringstream out;
  out << "digraph scene_graph_" << graph.frame_index << " {\n";
  out << "  graph [rankdir=LR];\n";
  out << "  node [shape=ellipse, style=filled, fillcolor=white];\n";
  for (const auto& node : graph.nodes) {
    const char* fill = node.node_id == kEgoNode       ? "lightblue"
                       : node.actor_type == "lane"    ? "lightgray"
                                                      : "white";
    out << "  n" << node.node_id << " [label=\"" << dot_escape(node.label + ":" + node.actor_type)
        << "\", fillcolor=" << fill << "];\n";
  }
  for (const auto& e : graph.edges) {
    const char* cls = "other";
    const char* color = "black";
    switch (relation_kind(cfg, e.relation)) {
      case RelationKind::kBelonging: cls = "belonging"; color = "darkgreen"; break;
      case RelationKind::kProximity: cls = "proximity"; color = "red"; break;
      case RelationKind::kDirectional: cls = "directional"; color = "blue"; break;
      case RelationKind::kOther: break;
    }
    out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << dot_escape(e.relation)
        << "\", class=\"" << cls << "\", color=" << color << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace roadgraph

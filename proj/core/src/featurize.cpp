#include "roadgraph/featurize.hpp"

#include <algorithm>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {
constexpr double kPositionScale = 25.0;  // feet; the widest default proximity band
constexpr double kVelocityScale = 30.0;  // ft/s
}  // namespace

void TypedEdgeList::add(std::size_t relation, std::size_t src, std::size_t dst) {
  if (relation >= num_relations) {
    raise(ErrorCode::kRelationIndexError, "relation id " + std::to_string(relation) + " >= " +
                                              std::to_string(num_relations));
  }
  by_relation[relation].emplace_back(src, dst);
}

std::size_t TypedEdgeList::edge_count() const {
  std::size_t n = 0;
  for (const auto& list : by_relation) n += list.size();
  return n;
}

GraphInput make_graph_input(ad::Tensor features, TypedEdgeList edges) {
  const std::size_t n = features.rows();
  GraphInput input{std::move(features), std::move(edges), {}};
  for (std::size_t r = 0; r < input.edges.num_relations; ++r) {
    const auto& list = input.edges.by_relation[r];
    if (list.empty()) continue;
    auto sum = ad::Tensor::zeros(n, n);
    for (const auto& [src, dst] : list) {
      if (src >= n || dst >= n) {
        raise(ErrorCode::kShapeError, "edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                                          ") outside a graph of " + std::to_string(n) + " nodes");
      }
      sum.at(dst, src) += 1.0;
    }
    auto mean = sum.clone();
    for (std::size_t i = 0; i < n; ++i) {
      double degree = 0.0;
      for (std::size_t j = 0; j < n; ++j) degree += sum.at(i, j);
      if (degree == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) mean.at(i, j) /= degree;
    }
    input.adjacency.push_back({r, std::move(sum), std::move(mean)});
  }
  return input;
}

TypedEdgeList filter_edges(const TypedEdgeList& edges, const std::vector<std::size_t>& kept,
                           std::size_t node_count) {
  std::vector<long> remap(node_count, -1);
  for (std::size_t i = 0; i < kept.size(); ++i) remap[kept[i]] = static_cast<long>(i);
  TypedEdgeList out(edges.num_relations);
  for (std::size_t r = 0; r < edges.num_relations; ++r) {
    for (const auto& [src, dst] : edges.by_relation[r]) {
      if (remap[src] >= 0 && remap[dst] >= 0) {
        out.by_relation[r].emplace_back(static_cast<std::size_t>(remap[src]),
                                        static_cast<std::size_t>(remap[dst]));
      }
    }
  }
  return out;
}

std::size_t feature_width(const ExtractionConfig& cfg, bool append_attributes) {
  return cfg.actor_names.size() + (append_attributes ? 4 : 0);
}

GraphInput featurize(const SceneGraph& graph, const ExtractionConfig& cfg, bool append_attributes) {
  const std::size_t n = graph.nodes.size();
  const std::size_t width = feature_width(cfg, append_attributes);
  auto x = ad::Tensor::zeros(n, width);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = graph.nodes[i];
    const auto it = std::find(cfg.actor_names.begin(), cfg.actor_names.end(), node.actor_type);
    if (it == cfg.actor_names.end()) {
      raise(ErrorCode::kVocabularyMismatch, "node actor type '" + node.actor_type + "' not in actor_names");
    }
    x.at(i, static_cast<std::size_t>(it - cfg.actor_names.begin())) = 1.0;
    if (append_attributes && node.actor_type != "lane") {
      const std::size_t base = cfg.actor_names.size();
      x.at(i, base + 0) = node.attributes.position[0] / kPositionScale;
      x.at(i, base + 1) = node.attributes.position[1] / kPositionScale;
      x.at(i, base + 2) = node.attributes.velocity[0] / kVelocityScale;
      x.at(i, base + 3) = node.attributes.velocity[1] / kVelocityScale;
    }
  }
  TypedEdgeList edges(cfg.relation_names.size());
  for (const auto& e : graph.edges) {
    const int r = cfg.relation_index(e.relation);
    if (r < 0) raise(ErrorCode::kRelationIndexError, "relation '" + e.relation + "' not in relation_names");
    edges.add(static_cast<std::size_t>(r), static_cast<std::size_t>(e.src), static_cast<std::size_t>(e.dst));
  }
  return make_graph_input(std::move(x), std::move(edges));
}

}  // namespace roadgraph

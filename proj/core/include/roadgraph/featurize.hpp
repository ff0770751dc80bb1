#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "roadgraph/extraction_config.hpp"
#include "roadgraph/scenegraph.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph {

// Per relation id, the (src, dst) node index pairs. Messages flow src -> dst.
struct TypedEdgeList {
  std::size_t num_relations = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_relation;

  explicit TypedEdgeList(std::size_t relations = 0) : num_relations(relations), by_relation(relations) {}
  void add(std::size_t relation, std::size_t src, std::size_t dst);
  std::size_t edge_count() const;
};

// Dense incoming-neighbour matrices for one relation: `sum` has a 1 at
// (dst, src); `mean` scales each row by 1 / in-degree.
struct RelationAdjacency {
  std::size_t relation = 0;
  ad::Tensor sum;
  ad::Tensor mean;
};

// Model-ready graph: node features plus adjacency for every relation that
// has at least one edge.
struct GraphInput {
  ad::Tensor features;
  TypedEdgeList edges;
  std::vector<RelationAdjacency> adjacency;

  std::size_t node_count() const { return features.rows(); }
};

GraphInput make_graph_input(ad::Tensor features, TypedEdgeList edges);

// Restricts a graph's edges to `kept` nodes (ascending) and re-indexes them.
TypedEdgeList filter_edges(const TypedEdgeList& edges, const std::vector<std::size_t>& kept,
                           std::size_t node_count);

// Number of input features for a vocabulary.
std::size_t feature_width(const ExtractionConfig& cfg, bool append_attributes);

// One-hot actor type per node; with `append_attributes`, position and
// velocity scaled to O(1) are appended.
GraphInput featurize(const SceneGraph& graph, const ExtractionConfig& cfg,
                     bool append_attributes = false);

}  // namespace roadgraph

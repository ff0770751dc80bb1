#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "roadgraph/dataset.hpp"
#include "roadgraph/random.hpp"

// Straight-line re-statement of the default extraction rules, written from
// the rule tables rather than from the production code.
namespace oracle {

struct Edge {
  int src = 0;
  int dst = 0;
  std::string relation;
  auto operator<=>(const Edge&) const = default;
};

// Objects must carry canonical actor types (car, motorcycle, bicycle,
// pedestrian, light, sign). Output is sorted.
std::vector<Edge> brute_force_edges(const std::vector<roadgraph::ObjectState>& objects);

// Up to `max_objects` objects with unique ids, canonical types, positions
// uniform in [-extent, extent]^2 and random yaw (sometimes absent).
std::vector<roadgraph::ObjectState> random_frame(roadgraph::Rng& rng, int max_objects, double extent);

}  // namespace oracle

#include "extraction_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace oracle {

namespace {

const double kPi = std::acos(-1.0);

bool road_user(const std::string& t) {
  return t == "car" || t == "motorcycle" || t == "bicycle" || t == "pedestrian";
}
bool infrastructure(const std::string& t) { return t == "light" || t == "sign"; }
bool in_lanes(const std::string& t) { return t == "car" || t == "motorcycle" || t == "bicycle"; }

struct Member {
  int node;
  std::string type;
  double x, y, yaw;
};

const char* sector_name(double bearing) {
  static const char* names[8] = {"Rear_Left",   "Left_Rear",   "Left_Front", "Front_Left",
                                 "Front_Right", "Right_Front", "Right_Rear", "Rear_Right"};
  int idx = static_cast<int>(std::floor((bearing + 180.0) / 45.0));
  if (idx < 0) idx = 0;
  if (idx > 7) idx = 7;
  return names[idx];
}

}  // namespace

std::vector<Edge> brute_force_edges(const std::vector<roadgraph::ObjectState>& objects) {
  std::vector<const roadgraph::ObjectState*> sorted;
  for (const auto& o : objects) sorted.push_back(&o);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<Member> members{{0, "car", 0.0, 0.0, 0.0}};
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto* o = sorted[i];
    members.push_back({static_cast<int>(i) + 4, o->actor_type, o->position[0], o->position[1],
                       o->yaw ? *o->yaw : 0.0});
  }

  std::vector<Edge> edges{{0, 2, "isIn"}};
  for (std::size_t i = 1; i < members.size(); ++i) {
    const auto& m = members[i];
    if (!in_lanes(m.type)) continue;
    const int side = m.x >= 0 ? 3 : 1;
    const double off = std::fabs(m.x);
    if (std::fabs(off - 6.0) <= 1.5) {
      edges.push_back({m.node, 2, "isIn"});
      edges.push_back({m.node, side, "isIn"});
    } else if (off <= 6.0) {
      edges.push_back({m.node, 2, "isIn"});
    } else {
      edges.push_back({m.node, side, "isIn"});
    }
  }

  const std::pair<const char*, double> bands[5] = {
      {"Near_Collision", 4}, {"Super_Near", 7}, {"Very_Near", 10}, {"Near", 16}, {"Visible", 25}};
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (i == j) continue;
      const auto& a = members[i];
      const auto& b = members[j];
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double d = std::sqrt(dx * dx + dy * dy);
      const bool both_road = road_user(a.type) && road_user(b.type);
      const bool mixed = (road_user(a.type) && infrastructure(b.type)) || (infrastructure(a.type) && road_user(b.type));
      if (both_road) {
        for (const auto& [name, limit] : bands) {
          if (d <= limit) edges.push_back({a.node, b.node, name});
        }
        if (d <= 16.0) {
          double bearing = std::atan2(dx, dy) * 180.0 / kPi - a.yaw;
          while (bearing >= 180.0) bearing -= 360.0;
          while (bearing < -180.0) bearing += 360.0;
          edges.push_back({a.node, b.node, sector_name(bearing)});
        }
      } else if (mixed && d <= 25.0) {
        edges.push_back({a.node, b.node, "Visible"});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<roadgraph::ObjectState> random_frame(roadgraph::Rng& rng, int max_objects, double extent) {
  static const char* types[6] = {"car", "motorcycle", "bicycle", "pedestrian", "light", "sign"};
  const auto n = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_objects) + 1));
  std::vector<roadgraph::ObjectState> out;
  for (int k = 0; k < n; ++k) {
    roadgraph::ObjectState o;
    char id[16];
    std::snprintf(id, sizeof id, "obj%02d", static_cast<int>(rng.uniform_index(100)));
    o.id = id + std::to_string(k);
    // Cars dominate real scenes.
    o.actor_type = rng.uniform() < 0.5 ? "car" : types[rng.uniform_index(6)];
    o.position = {rng.uniform(-extent, extent), rng.uniform(-extent, extent), 0.0};
    if (rng.uniform() < 0.8) o.yaw = rng.uniform(-180.0, 180.0);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace oracle

#include "roadgraph/extraction_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "roadgraph/error.hpp"

namespace roadgraph {

using nlohmann::json;

namespace {

std::string alias_key(const std::string& actor) {
  if (actor == "motorcycle") return "moto_names";
  if (actor == "pedestrian") return "ped_names";
  return actor + "_names";
}

std::string actor_for_alias_key(const std::string& key) {
  const auto prefix = key.substr(0, key.size() - std::string("_names").size());
  if (prefix == "moto") return "motorcycle";
  if (prefix == "ped") return "pedestrian";
  return prefix;
}

std::vector<ActorPairRule> all_pairs(const std::vector<std::string>& types) {
  std::vector<ActorPairRule> out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (std::size_t j = i; j < types.size(); ++j) out.push_back({types[i], types[j], {}});
  }
  return out;
}

json rules_to_json(const std::vector<ActorPairRule>& rules) {
  json out = json::array();
  for (const auto& r : rules) {
    json entry = {r.first, r.second};
    for (const auto& rel : r.relations) entry.push_back(rel);
    out.push_back(entry);
  }
  return out;
}

std::vector<ActorPairRule> rules_from_json(const json& j) {
  std::vector<ActorPairRule> out;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() < 2) {
      raise(ErrorCode::kConfigError, "relation list entries must be [type_a, type_b, ...]");
    }
    ActorPairRule rule{entry[0].get<std::string>(), entry[1].get<std::string>(), {}};
    for (std::size_t i = 2; i < entry.size(); ++i) rule.relations.push_back(entry[i].get<std::string>());
    out.push_back(std::move(rule));
  }
  return out;
}

}  // namespace

bool ActorPairRule::allows(const std::string& relation) const {
  return relations.empty() ||
         std::find(relations.begin(), relations.end(), relation) != relations.end();
}

ExtractionConfig ExtractionConfig::defaults() {
  ExtractionConfig cfg;
  cfg.actor_names = {"car", "motorcycle", "bicycle", "pedestrian", "lane", "light", "sign"};
  cfg.proximity_thresholds = {{"Near_Collision", 4}, {"Super_Near", 7}, {"Very_Near", 10},
                              {"Near", 16}, {"Visible", 25}};
  cfg.directional_thresholds = {
      {"Front_Right", 0, 45},    {"Right_Front", 45, 90},   {"Right_Rear", 90, 135},
      {"Rear_Right", 135, 180},  {"Front_Left", -45, 0},    {"Left_Front", -90, -45},
      {"Left_Rear", -135, -90},  {"Rear_Left", -180, -135},
  };
  cfg.relation_names = {kRelationIsIn};
  for (const auto& band : cfg.proximity_thresholds) cfg.relation_names.push_back(band.relation);
  for (const auto& sector : cfg.directional_thresholds) cfg.relation_names.push_back(sector.relation);

  cfg.class_aliases = {
      {"car", {"car", "vehicle.tesla.model3", "vehicle.audi.a2", "vehicle.audi.tt",
               "vehicle.bmw.grandtourer", "vehicle.chevrolet.impala", "vehicle.dodge_charger.police",
               "vehicle.lincoln.mkz2017", "vehicle.mercedes-benz.coupe", "vehicle.mini.cooperst",
               "vehicle.nissan.micra", "vehicle.toyota.prius", "vehicle.volkswagen.t2"}},
      {"motorcycle", {"motorcycle", "motorbike", "vehicle.harley-davidson.low_rider",
                      "vehicle.kawasaki.ninja", "vehicle.yamaha.yzf"}},
      {"bicycle", {"bicycle", "vehicle.bh.crossbike", "vehicle.diamondback.century",
                   "vehicle.gazelle.omafiets"}},
      {"pedestrian", {"pedestrian", "person", "walker"}},
      {"lane", {"lane"}},
      {"light", {"light", "traffic light", "traffic_light", "traffic.traffic_light"}},
      {"sign", {"sign", "stop sign", "traffic_sign", "traffic.stop", "traffic.speed_limit"}},
  };

  const std::vector<std::string> road_users = {"car", "motorcycle", "bicycle", "pedestrian"};
  cfg.proximity_relation_list = all_pairs(road_users);
  for (const auto& user : road_users) {
    cfg.proximity_relation_list.push_back({user, "light", {"Visible"}});
    cfg.proximity_relation_list.push_back({user, "sign", {"Visible"}});
  }
  cfg.directional_relation_list = all_pairs(road_users);
  cfg.lane_actor_names = {"car", "motorcycle", "bicycle"};
  return cfg;
}

ExtractionConfig ExtractionConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kNotFound, "extraction config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

ExtractionConfig ExtractionConfig::from_json_text(const std::string& text) {
  ExtractionConfig cfg = defaults();
  try {
    const json j = json::parse(text);
    if (!j.is_object()) raise(ErrorCode::kConfigError, "extraction config must be a JSON object");
    if (j.contains("actor_names")) cfg.actor_names = j["actor_names"].get<std::vector<std::string>>();
    if (j.contains("relation_names")) {
      cfg.relation_names = j["relation_names"].get<std::vector<std::string>>();
    }
    bool aliases_reset = false;
    for (const auto& [key, value] : j.items()) {
      if (key == "actor_names" || key == "relation_names" || key == "lane_actor_names") continue;
      if (key.size() > 6 && key.ends_with("_names")) {
        if (!aliases_reset) {
          cfg.class_aliases.clear();
          aliases_reset = true;
        }
        cfg.class_aliases[actor_for_alias_key(key)] = value.get<std::vector<std::string>>();
      }
    }
    if (j.contains("proximity_thresholds")) {
      cfg.proximity_thresholds.clear();
      for (const auto& e : j["proximity_thresholds"]) {
        cfg.proximity_thresholds.push_back({e.at(0).get<std::string>(), e.at(1).get<double>()});
      }
    }
    if (j.contains("directional_thresholds")) {
      cfg.directional_thresholds.clear();
      for (const auto& e : j["directional_thresholds"]) {
        const auto& range = e.at(1);
        cfg.directional_thresholds.push_back(
            {e.at(0).get<std::string>(), range.at(0).get<double>(), range.at(1).get<double>()});
      }
    }
    if (j.contains("proximity_relation_list")) {
      cfg.proximity_relation_list = rules_from_json(j["proximity_relation_list"]);
    }
    if (j.contains("directional_relation_list")) {
      cfg.directional_relation_list = rules_from_json(j["directional_relation_list"]);
    }
    if (j.contains("lane_threshold")) cfg.lane_threshold = j["lane_threshold"].get<double>();
    if (j.contains("lane_overlap_margin")) cfg.lane_overlap_margin = j["lane_overlap_margin"].get<double>();
    if (j.contains("ego_only")) cfg.ego_only = j["ego_only"].get<bool>();
    if (j.contains("cumulative_proximity")) cfg.cumulative_proximity = j["cumulative_proximity"].get<bool>();
    if (j.contains("lane_actor_names")) {
      cfg.lane_actor_names = j["lane_actor_names"].get<std::vector<std::string>>();
    }
    if (j.contains("directional_max_distance")) {
      cfg.directional_max_distance = j["directional_max_distance"].get<double>();
    } else if (j.contains("proximity_thresholds")) {
      for (const auto& band : cfg.proximity_thresholds) {
        if (band.relation == "Near") cfg.directional_max_distance = band.max_distance;
      }
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfigError, std::string("extraction config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string ExtractionConfig::to_json_text() const {
  json j;
  j["actor_names"] = actor_names;
  j["relation_names"] = relation_names;
  for (const auto& [actor, labels] : class_aliases) j[alias_key(actor)] = labels;
  json prox = json::array();
  for (const auto& band : proximity_thresholds) prox.push_back({band.relation, band.max_distance});
  j["proximity_thresholds"] = prox;
  json dirs = json::array();
  for (const auto& s : directional_thresholds) dirs.push_back({s.relation, {s.min_deg, s.max_deg}});
  j["directional_thresholds"] = dirs;
  j["proximity_relation_list"] = rules_to_json(proximity_relation_list);
  j["directional_relation_list"] = rules_to_json(directional_relation_list);
  j["directional_max_distance"] = directional_max_distance;
  j["lane_threshold"] = lane_threshold;
  j["lane_overlap_margin"] = lane_overlap_margin;
  j["ego_only"] = ego_only;
  j["cumulative_proximity"] = cumulative_proximity;
  j["lane_actor_names"] = lane_actor_names;
  return j.dump(2);
}

void ExtractionConfig::validate() const {
  auto fail = [](const std::string& msg) { raise(ErrorCode::kConfigError, msg); };
  const std::set<std::string> actors(actor_names.begin(), actor_names.end());
  const std::set<std::string> relations(relation_names.begin(), relation_names.end());
  if (actors.size() != actor_names.size()) fail("actor_names contains duplicates");
  if (relations.size() != relation_names.size()) fail("relation_names contains duplicates");
  for (const auto* required : {"car", "lane"}) {
    if (!actors.contains(required)) fail(std::string("actor_names must include '") + required + "'");
  }
  if (!relations.contains(kRelationIsIn)) fail("relation_names must include 'isIn'");
  if (!(lane_threshold > 0)) fail("lane_threshold must be positive");
  if (lane_overlap_margin < 0) fail("lane_overlap_margin must be non-negative");
  if (directional_max_distance < 0) fail("directional_max_distance must be non-negative");

  for (std::size_t i = 0; i < proximity_thresholds.size(); ++i) {
    const auto& band = proximity_thresholds[i];
    if (!relations.contains(band.relation)) fail("unknown proximity relation '" + band.relation + "'");
    if (band.max_distance < 0) fail("proximity threshold must be non-negative");
    if (i > 0 && !(band.max_distance > proximity_thresholds[i - 1].max_distance)) {
      fail("proximity thresholds must be strictly increasing");
    }
  }

  if (!directional_thresholds.empty()) {
    auto sectors = directional_thresholds;
    std::sort(sectors.begin(), sectors.end(),
              [](const auto& a, const auto& b) { return a.min_deg < b.min_deg; });
    if (sectors.front().min_deg != -180.0 || sectors.back().max_deg != 180.0) {
      fail("directional sectors must cover [-180, 180)");
    }
    for (std::size_t i = 0; i < sectors.size(); ++i) {
      if (!relations.contains(sectors[i].relation)) {
        fail("unknown directional relation '" + sectors[i].relation + "'");
      }
      if (!(sectors[i].min_deg < sectors[i].max_deg)) fail("empty directional sector");
      if (i > 0 && sectors[i].min_deg != sectors[i - 1].max_deg) {
        fail("directional sectors must be contiguous and non-overlapping");
      }
    }
  }

  auto check_rules = [&](const std::vector<ActorPairRule>& rules, const char* what) {
    for (const auto& r : rules) {
      if (!actors.contains(r.first) || !actors.contains(r.second)) {
        fail(std::string(what) + " names an unknown actor type");
      }
      for (const auto& rel : r.relations) {
        if (!relations.contains(rel)) fail(std::string(what) + " names unknown relation '" + rel + "'");
      }
    }
  };
  check_rules(proximity_relation_list, "proximity_relation_list");
  check_rules(directional_relation_list, "directional_relation_list");
  for (const auto& [actor, labels] : class_aliases) {
    if (!actors.contains(actor)) fail("alias list for unknown actor type '" + actor + "'");
  }
  for (const auto& a : lane_actor_names) {
    if (!actors.contains(a)) fail("lane_actor_names names unknown actor '" + a + "'");
  }
}

int ExtractionConfig::relation_index(const std::string& relation) const {
  const auto it = std::find(relation_names.begin(), relation_names.end(), relation);
  return it == relation_names.end() ? -1 : static_cast<int>(it - relation_names.begin());
}

RelationKind relation_kind(const ExtractionConfig& cfg, const std::string& relation) {
  if (relation == kRelationIsIn) return RelationKind::kBelonging;
  for (const auto& band : cfg.proximity_thresholds) {
    if (band.relation == relation) return RelationKind::kProximity;
  }
  for (const auto& s : cfg.directional_thresholds) {
    if (s.relation == relation) return RelationKind::kDirectional;
  }
  return RelationKind::kOther;
}

}  // namespace roadgraph

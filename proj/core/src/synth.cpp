#include "roadgraph/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/random.hpp"

namespace roadgraph {

using nlohmann::json;

namespace {

constexpr int kMaxAttempts = 10000;
constexpr int kFinalFrames = 3;

using Track = std::vector<std::array<double, 2>>;  // noisy xy per frame

struct Vehicle {
  std::string id;
  Track track;
  std::array<double, 2> velocity{};  // ft per frame, noise free
  double yaw = 0.0;
};

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0) w += 360.0;
  return w - 180.0;
}

Track linear_track(std::array<double, 2> start, std::array<double, 2> step, int frames, double sigma, Rng& rng) {
  Track t;
  for (int f = 0; f < frames; ++f) {
    t.push_back({start[0] + f * step[0] + rng.normal(0.0, sigma), start[1] + f * step[1] + rng.normal(0.0, sigma)});
  }
  return t;
}

bool keeps_clear(const Track& track, const std::vector<Vehicle>& others, double limit) {
  for (std::size_t f = 0; f < track.size(); ++f) {
    if (distance(track[f], {0.0, 0.0}) <= limit) return false;
    for (const auto& o : others) {
      if (distance(track[f], o.track[f]) <= limit) return false;
    }
  }
  return true;
}

Vehicle approaching_vehicle(const SynthConfig& cfg, Rng& rng) {
  const int last = cfg.frames - 1;
  const int closest = last - 1;  // middle of the final three frames
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const bool from_front = rng.uniform() < 0.5;
    const double heading = (from_front ? 180.0 : 0.0) + rng.uniform(-20.0, 20.0);
    const double rad = heading * std::numbers::pi / 180.0;
    const double speed = rng.uniform(1.2, 2.0) * cfg.speed_scale;
    const std::array<double, 2> step{speed * std::sin(rad), speed * std::cos(rad)};
    const std::array<double, 2> meet{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const std::array<double, 2> start{meet[0] - closest * step[0], meet[1] - closest * step[1]};
    Vehicle v{"veh_0", linear_track(start, step, cfg.frames, cfg.noise_sigma, rng), step, wrap_degrees(heading)};
    bool ok = distance(v.track[0], {0.0, 0.0}) > cfg.safe_distance;
    for (int f = cfg.frames - kFinalFrames; f < cfg.frames && ok; ++f) {
      ok = distance(v.track[static_cast<std::size_t>(f)], {0.0, 0.0}) < cfg.collision_distance;
    }
    if (ok) return v;
  }
  raise(ErrorCode::kConfigError, "could not script an approaching vehicle; check speed_scale and frames");
}

Vehicle background_vehicle(const SynthConfig& cfg, int index, const std::vector<Vehicle>& placed, Rng& rng) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const auto lane = static_cast<double>(rng.uniform_index(3)) - 1.0;
    const std::array<double, 2> start{lane * cfg.lane_width + rng.uniform(-1.5, 1.5), rng.uniform(-70.0, 70.0)};
    const std::array<double, 2> step{0.0, rng.uniform(-1.0, 1.0) * cfg.speed_scale};
    Vehicle v{"veh_" + std::to_string(index), linear_track(start, step, cfg.frames, cfg.noise_sigma, rng), step, 0.0};
    if (keeps_clear(v.track, placed, cfg.safe_distance)) return v;
  }
  raise(ErrorCode::kConfigError, "could not place background vehicles clear of each other; lower max_vehicles");
}

std::string clip_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%04d", i);
  return buf;
}

}  // namespace

SynthConfig SynthConfig::from_json_text(const std::string& text) {
  SynthConfig c;
  try {
    const auto j = json::parse(text);
    if (!j.is_object()) raise(ErrorCode::kConfigError, "scenario config must be a JSON object");
    if (j.contains("name")) c.name = j["name"].get<std::string>();
    if (j.contains("clips")) c.clips = j["clips"].get<int>();
    if (j.contains("risky_fraction")) c.risky_fraction = j["risky_fraction"].get<double>();
    if (j.contains("frames")) c.frames = j["frames"].get<int>();
    if (j.contains("noise_sigma")) c.noise_sigma = j["noise_sigma"].get<double>();
    if (j.contains("lane_width")) c.lane_width = j["lane_width"].get<double>();
    if (j.contains("speed_scale")) c.speed_scale = j["speed_scale"].get<double>();
    if (j.contains("min_vehicles")) c.min_vehicles = j["min_vehicles"].get<int>();
    if (j.contains("max_vehicles")) c.max_vehicles = j["max_vehicles"].get<int>();
    if (j.contains("safe_distance")) c.safe_distance = j["safe_distance"].get<double>();
    if (j.contains("collision_distance")) c.collision_distance = j["collision_distance"].get<double>();
    if (j.contains("frame_rate")) c.frame_rate = j["frame_rate"].get<double>();
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfigError, std::string("scenario config: ") + e.what());
  }
  c.validate();
  return c;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kNotFound, "scenario config not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string SynthConfig::to_json_text() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["clips"] = clips;
  j["risky_fraction"] = risky_fraction;
  j["frames"] = frames;
  j["noise_sigma"] = noise_sigma;
  j["lane_width"] = lane_width;
  j["speed_scale"] = speed_scale;
  j["min_vehicles"] = min_vehicles;
  j["max_vehicles"] = max_vehicles;
  j["safe_distance"] = safe_distance;
  j["collision_distance"] = collision_distance;
  j["frame_rate"] = frame_rate;
  return j.dump(2);
}

void SynthConfig::validate() const {
  if (clips < 1) raise(ErrorCode::kConfigError, "clips must be >= 1");
  if (!(risky_fraction >= 0.0 && risky_fraction <= 1.0)) raise(ErrorCode::kConfigError, "risky_fraction must lie in [0, 1]");
  if (frames < kFinalFrames + 1) raise(ErrorCode::kConfigError, "frames must be >= 4");
  if (noise_sigma < 0.0) raise(ErrorCode::kConfigError, "noise_sigma must be >= 0");
  if (lane_width <= 0.0 || speed_scale <= 0.0 || frame_rate <= 0.0) {
    raise(ErrorCode::kConfigError, "lane_width, speed_scale and frame_rate must be positive");
  }
  if (min_vehicles < 0 || max_vehicles < min_vehicles) raise(ErrorCode::kConfigError, "need 0 <= min_vehicles <= max_vehicles");
  if (!(collision_distance > 0.0 && collision_distance < safe_distance)) {
    raise(ErrorCode::kConfigError, "need 0 < collision_distance < safe_distance");
  }
}

Dataset synthesize(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const auto n_risky = static_cast<int>(round_half_away(cfg.risky_fraction * cfg.clips));
  std::vector<int> labels(static_cast<std::size_t>(cfg.clips), 0);
  for (int i = 0; i < n_risky; ++i) labels[static_cast<std::size_t>(i)] = 1;
  rng.shuffle(std::span<int>(labels));

  Dataset ds;
  ds.name = cfg.name;
  ds.variant = Variant::kState;
  ds.units = Units::kFeet;
  for (int c = 0; c < cfg.clips; ++c) {
    const int label = labels[static_cast<std::size_t>(c)];
    std::vector<Vehicle> vehicles;
    if (label == 1) vehicles.push_back(approaching_vehicle(cfg, rng));
    const auto extra = cfg.min_vehicles + static_cast<int>(rng.uniform_index(
                                              static_cast<std::uint64_t>(cfg.max_vehicles - cfg.min_vehicles + 1)));
    for (int k = 1; k <= extra; ++k) vehicles.push_back(background_vehicle(cfg, k, vehicles, rng));

    Clip clip;
    clip.clip_id = clip_name(c);
    clip.label = label;
    clip.metadata["scenario"] = label == 1 ? "approach" : "cruise";
    if (label == 1) clip.metadata[kApproachingIdKey] = vehicles.front().id;
    const double ego_speed = 30.0 * cfg.speed_scale;  // ft/s
    for (int f = 0; f < cfg.frames; ++f) {
      std::vector<ObjectState> objects;
      ObjectState ego;
      ego.id = "ego";
      ego.actor_type = "car";
      ego.yaw = 0.0;
      ego.velocity = {0.0, ego_speed};
      objects.push_back(ego);
      for (const auto& v : vehicles) {
        ObjectState o;
        o.id = v.id;
        o.actor_type = "car";
        const auto& p = v.track[static_cast<std::size_t>(f)];
        o.position = {p[0], p[1], 0.0};
        o.yaw = v.yaw;
        o.velocity = {v.velocity[0] * cfg.frame_rate, ego_speed + v.velocity[1] * cfg.frame_rate};
        objects.push_back(std::move(o));
      }
      clip.frames.push_back({f, std::move(objects)});
    }
    ds.clips.push_back(std::move(clip));
  }
  return ds;
}

}  // namespace roadgraph

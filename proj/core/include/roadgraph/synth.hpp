#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "roadgraph/dataset.hpp"

namespace roadgraph {

// Scripted state-variant scenarios. Safe clips keep every pairwise xy
// distance (ego included) above `safe_distance` in every frame. Risky
// clips add one vehicle that starts beyond `safe_distance` and is within
// `collision_distance` of the ego in each of the final 3 frames; its id is
// stored in the clip metadata under "approaching_id".
struct SynthConfig {
  std::string name = "synth";
  int clips = 120;
  double risky_fraction = 0.5;
  int frames = 20;
  double noise_sigma = 0.5;   // feet, per coordinate per frame
  double lane_width = 12.0;   // feet between lane centres
  double speed_scale = 1.0;   // multiplies every relative speed
  int min_vehicles = 1;       // background vehicles per clip
  int max_vehicles = 3;
  double safe_distance = 16.0;
  double collision_distance = 4.0;
  double frame_rate = 10.0;   // frames per second, for velocity fields

  static SynthConfig from_json_text(const std::string& text);
  static SynthConfig load(const std::filesystem::path& path);
  std::string to_json_text() const;
  void validate() const;  // ConfigError
};

inline constexpr const char* kApproachingIdKey = "approaching_id";

Dataset synthesize(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace roadgraph

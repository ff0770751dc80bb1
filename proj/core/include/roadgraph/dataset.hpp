#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace roadgraph {

inline constexpr double kFeetPerMeter = 3.28084;

enum class LightStatus { kRed, kYellow, kGreen, kOff };

// A road actor in the ego frame: +y forward, +x to the right, distances in
// feet. `actor_type` is the raw source type and is resolved against the
// extraction config's alias lists during graph extraction.
struct ObjectState {
  std::string id;
  std::string actor_type;
  std::array<double, 3> position{};
  std::optional<double> yaw;  // degrees in [-180, 180); 0 faces +y, 90 faces +x
  std::array<double, 2> velocity{};
  std::optional<std::string> lane;
  std::optional<LightStatus> light;
  std::optional<double> sign;

  bool operator==(const ObjectState&) const = default;
};

struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  bool operator==(const BoundingBox&) const = default;
};

struct Detection {
  std::string class_label;
  BoundingBox bbox;
  double confidence = 1.0;

  bool operator==(const Detection&) const = default;
};

enum class Variant { kState, kImage };
enum class Units { kFeet, kMeters };

struct FrameRecord {
  std::int64_t frame_index = 0;
  std::variant<std::vector<ObjectState>, std::vector<Detection>> payload;

  bool is_state() const { return payload.index() == 0; }
  const std::vector<ObjectState>& objects() const { return std::get<0>(payload); }
  const std::vector<Detection>& detections() const { return std::get<1>(payload); }

  bool operator==(const FrameRecord&) const = default;
};

struct Clip {
  std::string clip_id;
  std::vector<FrameRecord> frames;
  std::optional<int> label;  // 0 safe, 1 risky/collision
  std::optional<double> raw_score;
  std::map<std::string, std::string> metadata;

  bool operator==(const Clip&) const = default;
};

struct Dataset {
  std::string name;
  Variant variant = Variant::kState;
  Units units = Units::kFeet;  // units of the source; in-memory values are feet
  std::vector<Clip> clips;

  bool operator==(const Dataset&) const = default;
};

struct SplitPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignments;  // clip_id -> fold

  std::vector<std::string> fold_members(int fold) const;
};

std::string to_string(Variant variant);
std::string to_string(LightStatus status);
std::optional<LightStatus> parse_light_status(const std::string& text);

// Reads `<path>/manifest.json` (optional) and one sub-directory per clip
// holding frames.jsonl and an optional label.json. An explicit `variant`
// must agree with the manifest when both are present.
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<Variant> variant = std::nullopt);

// Writes the canonical on-disk layout. Values are written in feet.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Per-line codecs shared with tests and tools.
FrameRecord parse_frame_line(const std::string& line, double length_scale);
std::string format_frame_line(const FrameRecord& frame);

// Label-level splitting primitives. Labels must be 0 or 1; results are
// indices into `labels`, ascending.
struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
IndexSplit stratified_indices(const std::vector<int>& labels, double train_ratio,
                              std::uint64_t seed);
std::vector<int> kfold_assignments(const std::vector<int>& labels, int k,
                                   std::uint64_t seed);
std::vector<std::size_t> downsample_indices(const std::vector<int>& labels,
                                            std::uint64_t seed);
std::pair<double, double> class_weights(const std::vector<int>& labels);

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset,
                                             double train_ratio,
                                             std::uint64_t seed);
SplitPlan kfold_plan(const Dataset& dataset, int k, std::uint64_t seed);
// Train/test datasets for one fold of a plan; test = clips in `fold`.
std::pair<Dataset, Dataset> apply_fold(const Dataset& dataset,
                                       const SplitPlan& plan, int fold);
Dataset downsample(const Dataset& dataset, std::uint64_t seed);
std::pair<double, double> class_weights(const Dataset& dataset);

// Rounds half away from zero; the rounding rule for stratified splitting.
long round_half_away(double value);

}  // namespace roadgraph

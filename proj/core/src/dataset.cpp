#include "roadgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/random.hpp"

namespace roadgraph {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Variant variant) {
  return variant == Variant::kState ? "state" : "image";
}

std::string to_string(LightStatus status) {
  switch (status) {
    case LightStatus::kRed: return "red";
    case LightStatus::kYellow: return "yellow";
    case LightStatus::kGreen: return "green";
    case LightStatus::kOff: return "off";
  }
  return "off";
}

std::optional<LightStatus> parse_light_status(const std::string& text) {
  if (text == "red") return LightStatus::kRed;
  if (text == "yellow") return LightStatus::kYellow;
  if (text == "green") return LightStatus::kGreen;
  if (text == "off") return LightStatus::kOff;
  return std::nullopt;
}

std::vector<std::string> SplitPlan::fold_members(int fold) const {
  std::vector<std::string> out;
  for (const auto& [id, f] : assignments) {
    if (f == fold) out.push_back(id);
  }
  return out;
}

namespace {

double finite_number(const json& value, const char* field) {
  if (!value.is_number()) {
    throw std::invalid_argument(std::string("field '") + field + "' is not a number");
  }
  const double x = value.get<double>();
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string("field '") + field + "' is not finite");
  }
  return x;
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0) w += 360.0;
  return w - 180.0;
}

ObjectState parse_object(const json& j, double scale) {
  ObjectState obj;
  obj.id = j.at("id").get<std::string>();
  obj.actor_type = j.at("actor_type").get<std::string>();
  const auto& pos = j.at("position");
  if (!pos.is_array() || pos.size() < 2 || pos.size() > 3) {
    throw std::invalid_argument("position must be [x, y] or [x, y, z]");
  }
  for (std::size_t i = 0; i < pos.size(); ++i) {
    obj.position[i] = finite_number(pos[i], "position") * scale;
  }
  if (j.contains("yaw") && !j["yaw"].is_null()) {
    obj.yaw = wrap_degrees(finite_number(j["yaw"], "yaw"));
  }
  if (j.contains("velocity") && !j["velocity"].is_null()) {
    const auto& vel = j["velocity"];
    if (!vel.is_array() || vel.size() != 2) {
      throw std::invalid_argument("velocity must be [vx, vy]");
    }
    obj.velocity = {finite_number(vel[0], "velocity") * scale,
                    finite_number(vel[1], "velocity") * scale};
  }
  if (j.contains("lane") && !j["lane"].is_null()) {
    obj.lane = j["lane"].is_string() ? j["lane"].get<std::string>() : j["lane"].dump();
  }
  if (j.contains("light") && !j["light"].is_null()) {
    auto status = parse_light_status(j["light"].get<std::string>());
    if (!status) throw std::invalid_argument("unknown light status");
    obj.light = *status;
  }
  if (j.contains("sign") && !j["sign"].is_null()) {
    obj.sign = finite_number(j["sign"], "sign");
  }
  return obj;
}

Detection parse_detection(const json& j) {
  Detection det;
  det.class_label = j.at("class").get<std::string>();
  const auto& box = j.at("bbox");
  if (!box.is_array() || box.size() != 4) {
    throw std::invalid_argument("bbox must be [x0, y0, x1, y1]");
  }
  det.bbox = {finite_number(box[0], "bbox"), finite_number(box[1], "bbox"),
              finite_number(box[2], "bbox"), finite_number(box[3], "bbox")};
  if (!(det.bbox.x_min < det.bbox.x_max) || !(det.bbox.y_min < det.bbox.y_max)) {
    throw std::invalid_argument("bbox must satisfy x0 < x1 and y0 < y1");
  }
  det.confidence = j.contains("confidence") ? finite_number(j["confidence"], "confidence") : 1.0;
  if (det.confidence < 0.0 || det.confidence > 1.0) {
    throw std::invalid_argument("confidence outside [0, 1]");
  }
  return det;
}

json object_to_json(const ObjectState& obj) {
  json j;
  j["id"] = obj.id;
  j["actor_type"] = obj.actor_type;
  j["position"] = {obj.position[0], obj.position[1], obj.position[2]};
  if (obj.yaw) j["yaw"] = *obj.yaw;
  j["velocity"] = {obj.velocity[0], obj.velocity[1]};
  if (obj.lane) j["lane"] = *obj.lane;
  if (obj.light) j["light"] = to_string(*obj.light);
  if (obj.sign) j["sign"] = *obj.sign;
  return j;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kNotFound, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
}

std::vector<int> labels_of(const Dataset& dataset) {
  std::vector<int> labels;
  labels.reserve(dataset.clips.size());
  for (const auto& clip : dataset.clips) {
    if (!clip.label) raise(ErrorCode::kLabelMissing, "clip '" + clip.clip_id + "' has no label");
    labels.push_back(*clip.label);
  }
  return labels;
}

void check_binary(const std::vector<int>& labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) raise(ErrorCode::kLabelError, "labels must be 0 or 1");
  }
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.name = dataset.name;
  out.variant = dataset.variant;
  out.units = dataset.units;
  out.clips.reserve(indices.size());
  for (auto i : indices) out.clips.push_back(dataset.clips[i]);
  return out;
}

}  // namespace

FrameRecord parse_frame_line(const std::string& line, double length_scale) {
  const json j = json::parse(line);
  FrameRecord frame;
  const auto index = j.at("frame_index");
  if (!index.is_number_integer() || index.get<std::int64_t>() < 0) {
    throw std::invalid_argument("frame_index must be a non-negative integer");
  }
  frame.frame_index = index.get<std::int64_t>();
  const bool has_objects = j.contains("objects");
  const bool has_detections = j.contains("detections");
  if (has_objects == has_detections) {
    throw std::invalid_argument("frame must carry exactly one of 'objects' or 'detections'");
  }
  if (has_objects) {
    std::vector<ObjectState> objects;
    for (const auto& o : j["objects"]) objects.push_back(parse_object(o, length_scale));
    frame.payload = std::move(objects);
  } else {
    std::vector<Detection> detections;
    for (const auto& d : j["detections"]) detections.push_back(parse_detection(d));
    frame.payload = std::move(detections);
  }
  return frame;
}

std::string format_frame_line(const FrameRecord& frame) {
  json j;
  j["frame_index"] = frame.frame_index;
  if (frame.is_state()) {
    json objects = json::array();
    for (const auto& obj : frame.objects()) objects.push_back(object_to_json(obj));
    j["objects"] = std::move(objects);
  } else {
    json detections = json::array();
    for (const auto& det : frame.detections()) {
      detections.push_back({{"class", det.class_label},
                            {"bbox", {det.bbox.x_min, det.bbox.y_min, det.bbox.x_max, det.bbox.y_max}},
                            {"confidence", det.confidence}});
    }
    j["detections"] = std::move(detections);
  }
  return j.dump();
}

Dataset load_dataset(const fs::path& path, std::optional<Variant> variant) {
  if (!fs::is_directory(path)) raise(ErrorCode::kNotFound, "dataset directory " + path.string());

  Dataset dataset;
  dataset.name = path.filename().string();
  std::optional<Variant> declared;
  double scale = 1.0;
  const auto manifest_path = path / "manifest.json";
  if (fs::exists(manifest_path)) {
    const json manifest = read_json_file(manifest_path);
    try {
      if (manifest.contains("name")) dataset.name = manifest["name"].get<std::string>();
      if (manifest.contains("variant")) {
        const auto v = manifest["variant"].get<std::string>();
        if (v == "state") declared = Variant::kState;
        else if (v == "image") declared = Variant::kImage;
        else raise(ErrorCode::kSchemaError, "manifest variant '" + v + "'");
      }
      if (manifest.contains("units")) {
        const auto u = manifest["units"].get<std::string>();
        if (u == "meters") {
          dataset.units = Units::kMeters;
          scale = kFeetPerMeter;
        } else if (u != "feet") {
          raise(ErrorCode::kSchemaError, "manifest units '" + u + "'");
        }
      }
    } catch (const json::exception& e) {
      raise(ErrorCode::kParseError, "manifest.json: " + std::string(e.what()));
    }
  }
  if (declared && variant && *declared != *variant) {
    raise(ErrorCode::kSchemaError, "requested variant " + to_string(*variant) +
                                       " but manifest declares " + to_string(*declared));
  }
  std::optional<Variant> seen = declared ? declared : variant;

  std::vector<fs::path> clip_dirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) clip_dirs.push_back(entry.path());
  }
  std::sort(clip_dirs.begin(), clip_dirs.end());

  for (const auto& dir : clip_dirs) {
    Clip clip;
    clip.clip_id = dir.filename().string();
    const auto frames_path = dir / "frames.jsonl";
    std::ifstream in(frames_path);
    if (!in) raise(ErrorCode::kNotFound, "clip '" + clip.clip_id + "' has no frames.jsonl");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      FrameRecord frame;
      try {
        frame = parse_frame_line(line, scale);
      } catch (const std::exception& e) {
        raise(ErrorCode::kParseError, "clip '" + clip.clip_id + "' line " +
                                          std::to_string(line_no) + ": " + e.what());
      }
      const Variant v = frame.is_state() ? Variant::kState : Variant::kImage;
      if (seen && *seen != v) {
        raise(ErrorCode::kSchemaError, "clip '" + clip.clip_id + "' line " +
                                           std::to_string(line_no) + " is " + to_string(v) +
                                           " but dataset is " + to_string(*seen));
      }
      seen = v;
      clip.frames.push_back(std::move(frame));
    }
    if (clip.frames.empty()) raise(ErrorCode::kParseError, "clip '" + clip.clip_id + "' has no frames");
    std::stable_sort(clip.frames.begin(), clip.frames.end(),
                     [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
    for (std::size_t i = 1; i < clip.frames.size(); ++i) {
      if (clip.frames[i].frame_index == clip.frames[i - 1].frame_index) {
        raise(ErrorCode::kParseError, "clip '" + clip.clip_id + "' repeats frame_index " +
                                          std::to_string(clip.frames[i].frame_index));
      }
    }

    const auto label_path = dir / "label.json";
    if (fs::exists(label_path)) {
      const json label = read_json_file(label_path);
      try {
        if (label.contains("label") && !label["label"].is_null()) {
          const int y = label["label"].get<int>();
          if (y != 0 && y != 1) raise(ErrorCode::kParseError, "clip '" + clip.clip_id + "' label must be 0 or 1");
          clip.label = y;
        }
        if (label.contains("raw_score") && !label["raw_score"].is_null()) {
          clip.raw_score = label["raw_score"].get<double>();
        }
        if (label.contains("metadata")) {
          for (const auto& [k, v] : label["metadata"].items()) {
            clip.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
          }
        }
      } catch (const json::exception& e) {
        raise(ErrorCode::kParseError, "clip '" + clip.clip_id + "' label.json: " + e.what());
      }
    }
    dataset.clips.push_back(std::move(clip));
  }
  dataset.variant = seen.value_or(Variant::kState);
  return dataset;
}

void save_dataset(const Dataset& dataset, const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) raise(ErrorCode::kIoError, "cannot create " + path.string());
  json manifest = {{"variant", to_string(dataset.variant)}, {"units", "feet"}, {"name", dataset.name}};
  write_text(path / "manifest.json", manifest.dump(2) + "\n");
  for (const auto& clip : dataset.clips) {
    const auto dir = path / clip.clip_id;
    fs::create_directories(dir, ec);
    if (ec) raise(ErrorCode::kIoError, "cannot create " + dir.string());
    std::ostringstream frames;
    for (const auto& frame : clip.frames) frames << format_frame_line(frame) << '\n';
    write_text(dir / "frames.jsonl", frames.str());
    if (clip.label || clip.raw_score || !clip.metadata.empty()) {
      json label = json::object();
      if (clip.label) label["label"] = *clip.label;
      if (clip.raw_score) label["raw_score"] = *clip.raw_score;
      if (!clip.metadata.empty()) label["metadata"] = clip.metadata;
      write_text(dir / "label.json", label.dump() + "\n");
    }
  }
}

long round_half_away(double value) { return std::lround(value); }

IndexSplit stratified_indices(const std::vector<int>& labels, double train_ratio,
                              std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    raise(ErrorCode::kInvalidArgument, "train_ratio must lie in (0, 1)");
  }
  check_binary(labels);
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::array<long, 2> n_train{};
  for (int c = 0; c < 2; ++c) {
    const auto n = static_cast<long>(by_class[c].size());
    n_train[c] = round_half_away(train_ratio * static_cast<double>(n));
  }
  const long target = round_half_away(train_ratio * static_cast<double>(labels.size()));
  const int larger = by_class[1].size() > by_class[0].size() ? 1 : 0;
  n_train[larger] += target - (n_train[0] + n_train[1]);
  for (int c = 0; c < 2; ++c) {
    const auto n = static_cast<long>(by_class[c].size());
    // A class with two or more members is represented on both sides.
    const long lo = n >= 2 ? 1 : 0;
    const long hi = n >= 2 ? n - 1 : n;
    n_train[c] = std::clamp(n_train[c], lo, hi);
  }

  Rng rng(seed);
  IndexSplit split;
  for (int c = 0; c < 2; ++c) {
    auto members = by_class[c];
    rng.shuffle(std::span(members));
    split.train.insert(split.train.end(), members.begin(), members.begin() + n_train[c]);
    split.test.insert(split.test.end(), members.begin() + n_train[c], members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<int> kfold_assignments(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) raise(ErrorCode::kInvalidFoldCount, "k must be at least 2");
  if (static_cast<std::size_t>(k) > labels.size()) {
    raise(ErrorCode::kInvalidFoldCount, "k=" + std::to_string(k) + " exceeds clip count " +
                                            std::to_string(labels.size()));
  }
  check_binary(labels);
  Rng rng(seed);
  std::vector<int> folds(labels.size(), -1);
  int next = 0;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    rng.shuffle(std::span(members));
    for (auto i : members) {
      folds[i] = next;
      next = (next + 1) % k;
    }
  }
  return folds;
}

std::vector<std::size_t> downsample_indices(const std::vector<int>& labels, std::uint64_t seed) {
  check_binary(labels);
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  const int majority = by_class[1].size() > by_class[0].size() ? 1 : 0;
  const std::size_t keep = by_class[1 - majority].size();
  std::vector<std::size_t> out = by_class[1 - majority];
  auto major = by_class[majority];
  if (major.size() > keep) {
    Rng rng(seed);
    rng.shuffle(std::span(major));
    major.resize(keep);
  }
  out.insert(out.end(), major.begin(), major.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, double> class_weights(const std::vector<int>& labels) {
  check_binary(labels);
  const auto n1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const auto n0 = static_cast<double>(labels.size()) - n1;
  if (n0 == 0 || n1 == 0) raise(ErrorCode::kDegenerateClasses, "both classes must be present");
  const auto n = n0 + n1;
  return {n / (2.0 * n0), n / (2.0 * n1)};
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double train_ratio,
                                             std::uint64_t seed) {
  const auto split = stratified_indices(labels_of(dataset), train_ratio, seed);
  return {subset(dataset, split.train), subset(dataset, split.test)};
}

SplitPlan kfold_plan(const Dataset& dataset, int k, std::uint64_t seed) {
  const auto folds = kfold_assignments(labels_of(dataset), k, seed);
  SplitPlan plan{k, seed, {}};
  for (std::size_t i = 0; i < folds.size(); ++i) {
    plan.assignments[dataset.clips[i].clip_id] = folds[i];
  }
  return plan;
}

std::pair<Dataset, Dataset> apply_fold(const Dataset& dataset, const SplitPlan& plan, int fold) {
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < dataset.clips.size(); ++i) {
    const auto it = plan.assignments.find(dataset.clips[i].clip_id);
    if (it == plan.assignments.end()) {
      raise(ErrorCode::kInvalidArgument, "clip '" + dataset.clips[i].clip_id + "' not in plan");
    }
    (it->second == fold ? test : train).push_back(i);
  }
  return {subset(dataset, train), subset(dataset, test)};
}

Dataset downsample(const Dataset& dataset, std::uint64_t seed) {
  return subset(dataset, downsample_indices(labels_of(dataset), seed));
}

std::pair<double, double> class_weights(const Dataset& dataset) {
  return class_weights(labels_of(dataset));
}

}  // namespace roadgraph

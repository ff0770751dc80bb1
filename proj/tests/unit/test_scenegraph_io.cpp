#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <regex>
#include <sstream>

#include "roadgraph/error.hpp"
#include "roadgraph/extraction.hpp"
#include "roadgraph/scenegraph.hpp"

namespace fs = std::filesystem;
using namespace roadgraph;

namespace {

SceneGraphDataset sample(int clips) {
  const auto cfg = ExtractionConfig::defaults();
  SceneGraphDataset d;
  d.name = "sample";
  d.config = cfg;
  d.metadata["source_variant"] = "state";
  for (int c = 0; c < clips; ++c) {
    SceneGraphClip clip;
    clip.clip_id = "clip_" + std::to_string(c);
    if (c % 2 == 0) clip.label = c % 4 == 0 ? 1 : 0;
    clip.metadata["scenario"] = "x";
    for (int f = 0; f < 2; ++f) {
      ObjectState o{"v", "car", {1.0 + c, 5.0 + f, 0}, 12.5, {0.25, -1}, {}, {}, {}};
      clip.graphs.push_back(extract_graph({o}, f, cfg).graph);
    }
    d.clips.push_back(std::move(clip));
  }
  return d;
}

}  // namespace

TEST(SceneGraphIo, RoundTripInMemoryAndFile) {
  const auto d = sample(3);
  EXPECT_EQ(parse_scenegraph_dataset(format_scenegraph_dataset(d)), d);
  const auto path = fs::temp_directory_path() / "roadgraph_sgd_roundtrip.sgd";
  save_scenegraph_dataset(d, path);
  EXPECT_EQ(load_scenegraph_dataset(path), d);
}

TEST(SceneGraphIo, OneRecordPerClip) {
  const auto text = format_scenegraph_dataset(sample(2));
  std::istringstream in(text);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 2);
}

TEST(SceneGraphIo, UnknownVersionIsSchemaError) {
  auto text = format_scenegraph_dataset(sample(1));
  text.replace(text.find("sgd.v1"), 6, "sgd.v9");
  try {
    parse_scenegraph_dataset(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
  }
}

TEST(ExportDot, EmptyFrame) {
  const auto dot = export_dot(extract_graph({}, 0, ExtractionConfig::defaults()).graph);
  const std::regex node(R"(^\s*n\d+ \[label=)");
  const std::regex edge(R"(^\s*n\d+ -> n\d+ \[label=)");
  int nodes = 0, edges = 0;
  std::istringstream in(dot);
  std::string line;
  while (std::getline(in, line)) {
    if (std::regex_search(line, edge)) ++edges;
    else if (std::regex_search(line, node)) ++nodes;
  }
  EXPECT_EQ(nodes, 4);
  EXPECT_EQ(edges, 1);
  EXPECT_NE(dot.find("label=\"isIn\""), std::string::npos);
}

TEST(ExportDot, WellFormedAndLabelled) {
  ObjectState o{"v", "car", {2, 9, 0}, std::nullopt, {0, 0}, {}, {}, {}};
  const auto dot = export_dot(extract_graph({o}, 3, ExtractionConfig::defaults()).graph);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '{'), std::count(dot.begin(), dot.end(), '}'));
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '"') % 2, 0);
  EXPECT_NE(dot.find("label=\"Near\""), std::string::npos);
  EXPECT_NE(dot.find("car_1"), std::string::npos);
}

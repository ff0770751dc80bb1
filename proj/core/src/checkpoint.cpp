#include "roadgraph/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <map>

#include "json.hpp"
#include "roadgraph/error.hpp"

namespace roadgraph::ad {

using nlohmann::json;

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::vector<unsigned char> to_le_bytes(std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
  }
  return bytes;
}

std::vector<double> from_le_bytes(const std::vector<unsigned char>& bytes) {
  if (bytes.size() % 8 != 0) raise(ErrorCode::kParseError, "checkpoint data is not a float64 array");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

}  // namespace

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) raise(ErrorCode::kParseError, "base64 length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int d = 0;
      if (c == '=') {
        ++pad;
      } else {
        d = lookup[static_cast<unsigned char>(c)];
        if (d < 0 || pad > 0) raise(ErrorCode::kParseError, "invalid base64 character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<unsigned char>(v & 0xff));
  }
  return out;
}

std::string format_checkpoint(const ParameterList& params, const std::string& model_config_json) {
  json j;
  j["format"] = kCheckpointFormat;
  j["model_config"] = json::parse(model_config_json);
  json entries = json::object();
  for (const auto& p : params) {
    entries[p.name] = {{"shape", {p.tensor.rows(), p.tensor.cols()}},
                       {"data", base64_encode(to_le_bytes(p.tensor.data()))}};
  }
  j["params"] = std::move(entries);
  return j.dump(1) + "\n";
}

CheckpointContents parse_checkpoint(const std::string& text) {
  CheckpointContents out;
  try {
    const json j = json::parse(text);
    const auto format = j.value("format", std::string());
    if (format != kCheckpointFormat) raise(ErrorCode::kSchemaError, "unsupported checkpoint format '" + format + "'");
    out.model_config_json = j.at("model_config").dump();
    for (const auto& [name, entry] : j.at("params").items()) {
      const auto rows = entry.at("shape").at(0).get<std::size_t>();
      const auto cols = entry.at("shape").at(1).get<std::size_t>();
      out.names.push_back(name);
      out.tensors.emplace_back(rows, cols, from_le_bytes(base64_decode(entry.at("data").get<std::string>())));
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::kParseError, std::string("checkpoint: ") + e.what());
  }
  return out;
}

void load_checkpoint_values(const CheckpointContents& contents, const ParameterList& params) {
  std::map<std::string, const Tensor*> by_name;
  for (std::size_t i = 0; i < contents.names.size(); ++i) by_name[contents.names[i]] = &contents.tensors[i];
  if (by_name.size() != params.size()) {
    raise(ErrorCode::kSchemaError, "checkpoint holds " + std::to_string(by_name.size()) +
                                       " parameters, model expects " + std::to_string(params.size()));
  }
  for (const auto& p : params) {
    const auto it = by_name.find(p.name);
    if (it == by_name.end()) raise(ErrorCode::kSchemaError, "checkpoint lacks parameter '" + p.name + "'");
    const Tensor& stored = *it->second;
    if (stored.rows() != p.tensor.rows() || stored.cols() != p.tensor.cols()) {
      raise(ErrorCode::kShapeError, "parameter '" + p.name + "' stored as " + stored.shape_string() +
                                        ", model expects " + p.tensor.shape_string());
    }
    Tensor target = p.tensor;
    auto dst = target.mutable_data();
    const auto src = stored.data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace roadgraph::ad

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "aec/model.hpp"

namespace aec {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'A', 'E', 'C', 'W'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_weights(const ModelWeights& w, const std::string& path) {
  auto& mutable_w = const_cast<ModelWeights&>(w);  // views only read here
  auto views = mutable_w.tensor_views();

  json header;
  header["version"] = kVersion;
  header["dtype"] = "f32le";
  header["config"] = {{"num_bins", w.cfg.num_bins},
                      {"hidden_dim", w.cfg.hidden_dim},
                      {"num_gru_layers", w.cfg.num_gru_layers}};
  json tensors = json::array();
  std::uint64_t offset = 0;
  for (const auto& v : views) {
    json t;
    t["name"] = v.name;
    t["shape"] = v.shape;
    t["offset"] = offset;
    tensors.push_back(std::move(t));
    offset += v.data->size() * sizeof(float);
  }
  header["tensors"] = std::move(tensors);
  const std::string header_str = header.dump();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("save_weights: cannot open " + path);
  }
  f.write(kMagic, 4);
  const auto ver = kVersion;
  f.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
  const auto header_len = static_cast<std::uint32_t>(header_str.size());
  f.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  f.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const auto& v : views) {
    std::vector<float> payload(v.data->size());
    for (std::size_t i = 0; i < payload.size(); ++i) {
      payload[i] = static_cast<float>((*v.data)[i]);
    }
    f.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  }
  if (!f) {
    throw std::runtime_error("save_weights: write failed for " + path);
  }
}

ModelWeights load_weights(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("load_weights: cannot open " + path);
  }
  std::vector<char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (raw.size() < 12 || std::memcmp(raw.data(), kMagic, 4) != 0) {
    throw std::runtime_error("load_weights: not a weight file: " + path);
  }
  std::uint32_t version = 0;
  std::uint32_t header_len = 0;
  std::memcpy(&version, raw.data() + 4, 4);
  std::memcpy(&header_len, raw.data() + 8, 4);
  if (version != kVersion) {
    throw std::runtime_error("load_weights: unsupported format version");
  }
  if (raw.size() < 12 + static_cast<std::size_t>(header_len)) {
    throw std::runtime_error("load_weights: truncated header in " + path);
  }
  const json header = json::parse(raw.begin() + 12, raw.begin() + 12 + header_len);
  if (header.at("dtype").get<std::string>() != "f32le") {
    throw std::runtime_error("load_weights: unsupported dtype");
  }

  ModelConfig cfg;
  cfg.num_bins = header.at("config").at("num_bins").get<int>();
  cfg.hidden_dim = header.at("config").at("hidden_dim").get<int>();
  cfg.num_gru_layers = header.at("config").at("num_gru_layers").get<int>();

  ModelWeights w = ModelWeights::zeros(cfg);
  auto views = w.tensor_views();
  const json& tensors = header.at("tensors");
  if (tensors.size() != views.size()) {
    throw std::runtime_error("load_weights: tensor directory does not match config");
  }
  const std::size_t payload_start = 12 + header_len;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const json& t = tensors.at(i);
    if (t.at("name").get<std::string>() != views[i].name) {
      throw std::runtime_error("load_weights: unexpected tensor '" +
                               t.at("name").get<std::string>() + "'");
    }
    const auto shape = t.at("shape").get<std::vector<int>>();
    if (shape != views[i].shape) {
      throw std::runtime_error("load_weights: shape mismatch for tensor '" + views[i].name + "'");
    }
    const auto offset = t.at("offset").get<std::uint64_t>();
    const std::size_t bytes = views[i].data->size() * sizeof(float);
    if (payload_start + offset + bytes > raw.size()) {
      throw std::runtime_error("load_weights: truncated payload in " + path);
    }
    const char* src = raw.data() + payload_start + offset;
    for (std::size_t k = 0; k < views[i].data->size(); ++k) {
      float v;
      std::memcpy(&v, src + k * sizeof(float), sizeof(float));
      (*views[i].data)[k] = static_cast<double>(v);
    }
  }
  return w;
}

ModelWeights load_weights(const std::string& path, const ModelConfig& expected) {
  ModelWeights w = load_weights(path);
  if (!(w.cfg == expected)) {
    throw std::runtime_error("load_weights: file config does not match expected model shape");
  }
  return w;
}

}  // namespace aec

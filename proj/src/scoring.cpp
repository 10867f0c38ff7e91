#include "aec/scoring.hpp"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace aec {
namespace {

using nlohmann::json;

constexpr char kB64Table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string encode_base64(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out.push_back(kB64Table[(v >> 6) & 63]);
    out.push_back(kB64Table[v & 63]);
    i += 3;
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kB64Table[(v >> 18) & 63]);
    out.push_back(kB64Table[(v >> 12) & 63]);
    out.push_back(kB64Table[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string clip_to_base64(const AudioClip& clip) {
  std::vector<std::uint8_t> bytes(clip.samples.size() * sizeof(float));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const float v = static_cast<float>(clip.samples[i]);
    std::memcpy(bytes.data() + i * sizeof(float), &v, sizeof(float));
  }
  return encode_base64(bytes);
}

ScoreClient::ScoreClient(std::string endpoint, std::string api_key, int max_attempts,
                         double backoff_s)
    : api_key_(std::move(api_key)), max_attempts_(max_attempts), backoff_s_(backoff_s) {
  // endpoint: "host:port" or "http://host:port"
  std::string e = std::move(endpoint);
  if (e.rfind("http://", 0) == 0) {
    e = e.substr(7);
  }
  const auto colon = e.rfind(':');
  if (colon == std::string::npos) {
    host_ = e;
  } else {
    host_ = e.substr(0, colon);
    port_ = std::stoi(e.substr(colon + 1));
  }
  if (host_.empty()) {
    throw std::invalid_argument("ScoreClient: empty endpoint");
  }
}

ClipScore ScoreClient::submit(const std::string& id, ScenarioKind kind, const AudioClip& far,
                              const AudioClip& mic, const AudioClip& processed) {
  json body;
  body["id"] = id;
  body["scenario_kind"] = to_string(kind);
  body["sample_rate_hz"] = mic.sample_rate_hz;
  body["far_end"] = clip_to_base64(far);
  body["mic"] = clip_to_base64(mic);
  body["processed"] = clip_to_base64(processed);
  const std::string payload = body.dump();

  ClipScore score;
  score.id = id;

  for (int attempt = 0; attempt < max_attempts_; ++attempt) {
    if (attempt > 0) {
      const double wait = backoff_s_ * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    httplib::Client client(host_, port_);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key_);
    }
    auto res = client.Post("/score", headers, payload, "application/json");
    if (!res || res->status >= 500) {
      score.note = !res ? "connection failed" : "server error " + std::to_string(res->status);
      continue;  // transient; retry
    }
    if (res->status != 200) {
      score.unavailable = true;
      score.note = "rejected with status " + std::to_string(res->status);
      return score;
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception&) {
      throw std::runtime_error("score response for clip " + id + " is not valid JSON");
    }
    auto require = [&](const char* field) {
      if (!reply.contains(field) || !reply.at(field).is_number()) {
        throw std::runtime_error("score response for clip " + id + " missing field '" +
                                 field + "'");
      }
      return reply.at(field).get<double>();
    };
    if (kind == ScenarioKind::nest) {
      score.mos = require("mos");
    } else {
      score.echo_dmos = require("echo_dmos");
      score.other_dmos = require("other_dmos");
    }
    return score;
  }
  score.unavailable = true;
  if (score.note.empty()) {
    score.note = "unavailable";
  }
  return score;
}

std::map<std::string, Transcript> load_transcript_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::map<std::string, Transcript> out;
  if (dir.empty()) {
    return out;
  }
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("load_transcript_dir: not a directory: " + dir);
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      out[entry.path().stem().string()] = load_transcript(entry.path().string());
    }
  }
  return out;
}

}  // namespace aec

#include "aec/manifest.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aec {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void check_keys(const json& j, const std::set<std::string>& known, const char* ctx) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw std::runtime_error(std::string("manifest schema: unknown field '") + key + "' in " + ctx);
    }
  }
}

json nonlinearity_to_json(const NonlinearitySpec& nl) {
  json j;
  switch (nl.kind) {
    case NonlinearitySpec::Kind::none:
      j["kind"] = "none";
      break;
    case NonlinearitySpec::Kind::hard_clip:
      j["kind"] = "hard_clip";
      j["clip_level"] = nl.clip_level;
      break;
    case NonlinearitySpec::Kind::sigmoid:
      j["kind"] = "sigmoid";
      j["sigmoid_slope"] = nl.sigmoid_slope;
      break;
  }
  return j;
}

NonlinearitySpec nonlinearity_from_json(const json& j) {
  check_keys(j, {"kind", "clip_level", "sigmoid_slope"}, "nonlinearity");
  NonlinearitySpec nl;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") {
    nl.kind = NonlinearitySpec::Kind::none;
  } else if (kind == "hard_clip") {
    nl.kind = NonlinearitySpec::Kind::hard_clip;
    nl.clip_level = j.at("clip_level").get<double>();
  } else if (kind == "sigmoid") {
    nl.kind = NonlinearitySpec::Kind::sigmoid;
    nl.sigmoid_slope = j.at("sigmoid_slope").get<double>();
  } else {
    throw std::runtime_error("manifest schema: unknown nonlinearity kind '" + kind + "'");
  }
  return nl;
}

json perturbation_to_json(const PerturbationSpec& p) {
  json j;
  switch (p.kind) {
    case PerturbationSpec::Kind::delay_jump:
      j["kind"] = "delay_jump";
      j["at_s"] = p.at_s;
      j["delay_delta_ms"] = p.delay_delta_ms;
      break;
    case PerturbationSpec::Kind::gain_variation: {
      j["kind"] = "gain_variation";
      json env = json::array();
      for (const auto& [t, g] : p.envelope) {
        env.push_back(json::array({t, g}));
      }
      j["envelope"] = std::move(env);
      break;
    }
    case PerturbationSpec::Kind::glitch:
      j["kind"] = "glitch";
      j["at_s"] = p.at_s;
      j["duration_s"] = p.duration_s;
      break;
  }
  return j;
}

PerturbationSpec perturbation_from_json(const json& j) {
  check_keys(j, {"kind", "at_s", "delay_delta_ms", "duration_s", "envelope"}, "perturbation");
  PerturbationSpec p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "delay_jump") {
    p.kind = PerturbationSpec::Kind::delay_jump;
    p.at_s = j.at("at_s").get<double>();
    p.delay_delta_ms = j.at("delay_delta_ms").get<double>();
  } else if (kind == "gain_variation") {
    p.kind = PerturbationSpec::Kind::gain_variation;
    for (const auto& pair : j.at("envelope")) {
      p.envelope.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  } else if (kind == "glitch") {
    p.kind = PerturbationSpec::Kind::glitch;
    p.at_s = j.at("at_s").get<double>();
    p.duration_s = j.at("duration_s").get<double>();
  } else {
    throw std::runtime_error("manifest schema: unknown perturbation kind '" + kind + "'");
  }
  return p;
}

json spec_to_json(const ScenarioSpec& s) {
  json j;
  j["seed"] = s.seed;
  j["ser_db"] = s.ser_db;
  if (std::isfinite(s.snr_db)) {
    j["snr_db"] = s.snr_db;
  }
  j["nonlinearity"] = nonlinearity_to_json(s.nonlinearity);
  j["use_noisy_speech"] = s.use_noisy_speech;
  j["near_end_speech_s"] = s.near_end_speech_s;
  j["clip_len_s"] = s.clip_len_s;
  j["rt60_s"] = s.rir.rt60_s;
  j["rir_length_s"] = s.rir.length_s;
  j["rir_direct_delay_ms"] = s.rir.direct_delay_ms;
  j["rir_seed"] = s.rir.seed;
  j["extra_delay_ms"] = s.extra_delay_ms;
  if (s.near_start_s) {
    j["near_start_s"] = *s.near_start_s;
  }
  if (!s.perturbations.empty()) {
    json arr = json::array();
    for (const auto& p : s.perturbations) {
      arr.push_back(perturbation_to_json(p));
    }
    j["perturbations"] = std::move(arr);
  }
  return j;
}

ScenarioSpec spec_from_json(const json& j) {
  check_keys(j,
             {"seed", "ser_db", "snr_db", "nonlinearity", "use_noisy_speech", "near_end_speech_s",
              "clip_len_s", "rt60_s", "rir_length_s", "rir_direct_delay_ms", "rir_seed",
              "extra_delay_ms", "near_start_s", "perturbations"},
             "scenario spec");
  ScenarioSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ser_db = j.at("ser_db").get<double>();
  s.snr_db = j.contains("snr_db") ? j.at("snr_db").get<double>()
                                  : std::numeric_limits<double>::infinity();
  s.nonlinearity = nonlinearity_from_json(j.at("nonlinearity"));
  s.use_noisy_speech = j.at("use_noisy_speech").get<bool>();
  s.near_end_speech_s = j.at("near_end_speech_s").get<double>();
  s.clip_len_s = j.at("clip_len_s").get<double>();
  s.rir.rt60_s = j.at("rt60_s").get<double>();
  s.rir.length_s = j.at("rir_length_s").get<double>();
  s.rir.direct_delay_ms = j.at("rir_direct_delay_ms").get<double>();
  s.rir.seed = j.at("rir_seed").get<std::uint64_t>();
  s.extra_delay_ms = j.at("extra_delay_ms").get<double>();
  if (j.contains("near_start_s")) {
    s.near_start_s = j.at("near_start_s").get<double>();
  }
  if (j.contains("perturbations")) {
    for (const auto& p : j.at("perturbations")) {
      s.perturbations.push_back(perturbation_from_json(p));
    }
  }
  return s;
}

}  // namespace

ManifestEntry write_bundle_wavs(const ScenarioBundle& bundle, const std::string& dir, int index,
                                const std::string& split, WavFormat format) {
  ManifestEntry entry;
  entry.index = index;
  entry.id = std::to_string(index);
  entry.split = split;
  entry.spec = bundle.spec;
  entry.far_end_file = entry.id + "_farend.wav";
  entry.echo_file = entry.id + "_echo.wav";
  entry.near_end_file = entry.id + "_nearend.wav";
  entry.mic_file = entry.id + "_mic.wav";
  const fs::path base(dir);
  write_wav(bundle.far_end, (base / entry.far_end_file).string(), format);
  write_wav(bundle.echo, (base / entry.echo_file).string(), format);
  write_wav(bundle.near_end_speech, (base / entry.near_end_file).string(), format);
  write_wav(bundle.mic, (base / entry.mic_file).string(), format);
  return entry;
}

ScenarioBundle load_bundle(const std::string& dir, const ManifestEntry& entry) {
  const fs::path base(dir);
  ScenarioBundle b;
  b.far_end = read_wav((base / entry.far_end_file).string());
  b.echo = read_wav((base / entry.echo_file).string());
  b.near_end_speech = read_wav((base / entry.near_end_file).string());
  b.mic = read_wav((base / entry.mic_file).string());
  b.spec = entry.spec;
  return b;
}

void save_manifest(const Manifest& manifest, const std::string& dir) {
  json j;
  j["version"] = manifest.version;
  j["sample_rate_hz"] = manifest.sample_rate_hz;
  json arr = json::array();
  for (const auto& e : manifest.entries) {
    json je;
    je["index"] = e.index;
    je["id"] = e.id;
    je["split"] = e.split;
    je["spec"] = spec_to_json(e.spec);
    je["files"] = {{"far_end", e.far_end_file},
                   {"echo", e.echo_file},
                   {"near_end", e.near_end_file},
                   {"mic", e.mic_file}};
    arr.push_back(std::move(je));
  }
  j["scenarios"] = std::move(arr);

  std::ofstream f(fs::path(dir) / "manifest.json");
  if (!f) {
    throw std::runtime_error("save_manifest: cannot write manifest in " + dir);
  }
  f << j.dump(2) << '\n';
}

Manifest load_manifest(const std::string& dir) {
  const fs::path path = fs::path(dir) / "manifest.json";
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("load_manifest: cannot open " + path.string());
  }
  json j = json::parse(f);
  check_keys(j, {"version", "sample_rate_hz", "scenarios"}, "manifest");
  Manifest m;
  m.version = j.at("version").get<int>();
  if (m.version != 1) {
    throw std::runtime_error("load_manifest: unsupported manifest version");
  }
  m.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  for (const auto& je : j.at("scenarios")) {
    check_keys(je, {"index", "id", "split", "spec", "files"}, "scenario entry");
    ManifestEntry e;
    e.index = je.at("index").get<int>();
    e.id = je.at("id").get<std::string>();
    e.split = je.at("split").get<std::string>();
    e.spec = spec_from_json(je.at("spec"));
    const json& files = je.at("files");
    check_keys(files, {"far_end", "echo", "near_end", "mic"}, "files");
    e.far_end_file = files.at("far_end").get<std::string>();
    e.echo_file = files.at("echo").get<std::string>();
    e.near_end_file = files.at("near_end").get<std::string>();
    e.mic_file = files.at("mic").get<std::string>();
    m.entries.push_back(std::move(e));
  }
  return m;
}

void emit_manifest(const std::vector<ScenarioBundle>& bundles, const std::string& dir,
                   WavFormat format, int validation_count) {
  fs::create_directories(dir);
  Manifest m;
  if (!bundles.empty()) {
    m.sample_rate_hz = bundles.front().mic.sample_rate_hz;
  }
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const std::string split =
        static_cast<int>(i) < validation_count ? "validation" : "train";
    m.entries.push_back(
        write_bundle_wavs(bundles[i], dir, static_cast<int>(i), split, format));
  }
  save_manifest(m, dir);
}

std::vector<ScenarioBundle> load_bundles(const std::string& dir) {
  const Manifest m = load_manifest(dir);
  std::vector<ScenarioBundle> bundles;
  bundles.reserve(m.entries.size());
  for (const auto& e : m.entries) {
    bundles.push_back(load_bundle(dir, e));
  }
  return bundles;
}

}  // namespace aec

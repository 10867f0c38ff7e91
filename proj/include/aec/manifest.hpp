#pragma once

#include <string>
#include <vector>

#include "aec/scenario.hpp"

namespace aec {

struct ManifestEntry {
  int index = 0;
  std::string id;     // stringified index, used in file names
  std::string split;  // "validation" or "train"
  ScenarioSpec spec;
  std::string far_end_file;
  std::string echo_file;
  std::string near_end_file;
  std::string mic_file;
};

// One JSON document per dataset directory, strict schema: unknown fields are
// rejected on load.
struct Manifest {
  int version = 1;
  int sample_rate_hz = 16000;
  std::vector<ManifestEntry> entries;
};

ManifestEntry write_bundle_wavs(const ScenarioBundle& bundle, const std::string& dir, int index,
                                const std::string& split, WavFormat format);
ScenarioBundle load_bundle(const std::string& dir, const ManifestEntry& entry);

void save_manifest(const Manifest& manifest, const std::string& dir);
Manifest load_manifest(const std::string& dir);

// Whole-dataset convenience wrappers; the CLI streams instead.
void emit_manifest(const std::vector<ScenarioBundle>& bundles, const std::string& dir,
                   WavFormat format = WavFormat::float32, int validation_count = 500);
std::vector<ScenarioBundle> load_bundles(const std::string& dir);

}  // namespace aec

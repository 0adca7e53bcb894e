#include "twinlight/cli/manifest.h"

#include <cstdio>

#include <json.hpp>

#include "twinlight/common/kv_text.h"
#include "twinlight/scene/scene_file.h"

namespace twinlight {

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string ConfigHash(const std::map<std::string, std::string>& config) {
  std::string text;
  for (const auto& [k, v] : config) text += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(Fnv1a64(text)));
  return buf;
}

std::string VersionString() {
  return std::string("twinlight ") + TWINLIGHT_VERSION + " (FB01, scene grammar v" +
         std::to_string(kSceneGrammarVersion) + ", SDF1)";
}

std::string FormatManifest(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["command_line"] = m.command_line;
  j["config"] = m.config;
  j["config_hash"] = ConfigHash(m.config);
  j["seeds"] = m.seeds;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["notes"] = m.notes;
  j["approximate"] = m.approximate;
  j["version"] = VersionString();
  j["wall_time_seconds"] = m.wall_time_seconds;
  return j.dump(2) + "\n";
}

void WriteManifest(const std::string& path, const RunManifest& manifest) {
  WriteTextFile(path, FormatManifest(manifest));
}

}  // namespace twinlight

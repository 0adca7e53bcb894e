#ifndef TWINLIGHT_CLI_MANIFEST_H_
#define TWINLIGHT_CLI_MANIFEST_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace twinlight {

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view bytes);

// Hash of the resolved configuration: FNV-1a over "key=value\n" lines in key
// order, as 16 lowercase hex digits.
std::string ConfigHash(const std::map<std::string, std::string>& config);

struct RunManifest {
  std::string command;
  std::vector<std::string> command_line;
  std::map<std::string, std::string> config;
  std::map<std::string, uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
  bool approximate = false;
  double wall_time_seconds = 0.0;
};

// "twinlight <version> (FB01, scene grammar v1, SDF1)".
std::string VersionString();

// Pretty JSON with sorted keys; only wall_time_seconds varies between
// identical runs.
std::string FormatManifest(const RunManifest& manifest);
void WriteManifest(const std::string& path, const RunManifest& manifest);

}  // namespace twinlight

#endif  // TWINLIGHT_CLI_MANIFEST_H_

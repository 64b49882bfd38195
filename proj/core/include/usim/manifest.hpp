#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace usim {

// Streaming FNV-1a over a file's bytes; cheap fingerprint for the manifest.
std::uint64_t fnv1a64_file(const std::string& path);
std::uint64_t fnv1a64_bytes(const void* data, std::size_t n);
std::string hex64(std::uint64_t v);

struct ArtifactEntry {
  std::string path;
  std::uint64_t bytes = 0;
  std::string fnv64;
};

// Run summary written next to the artifacts: the command, an echo of the
// effective configuration, every artifact's size and hash, wall-clock phase
// timings, and any per-sample error messages. Timings are the only
// nondeterministic content, so repeated runs agree everywhere else.
struct Manifest {
  std::string command;
  std::string config_json;  // serialized configuration echo
  std::vector<ArtifactEntry> artifacts;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::vector<std::string> errors;
};

void add_artifact(Manifest& m, const std::string& path);
void write_manifest(const Manifest& m, const std::string& path);

}  // namespace usim

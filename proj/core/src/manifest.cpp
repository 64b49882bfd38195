#include "usim/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "usim/common.hpp"
#include "usim/dataset.hpp"

namespace usim {

namespace {

constexpr std::uint64_t fnv_offset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t fnv_prime = 0x100000001b3ULL;

}  // namespace

std::uint64_t fnv1a64_bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = fnv_offset;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= fnv_prime;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path + " for hashing");
  std::uint64_t h = fnv_offset;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= fnv_prime;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void add_artifact(Manifest& m, const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("artifact missing: " + path);
  ArtifactEntry e;
  e.path = path;
  e.bytes = static_cast<std::uint64_t>(in.tellg());
  in.close();
  e.fnv64 = hex64(fnv1a64_file(path));
  m.artifacts.push_back(std::move(e));
}

void write_manifest(const Manifest& m, const std::string& path) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["format_version"] = format_version;
  j["command"] = m.command;
  j["config"] =
      m.config_json.empty() ? ordered_json::object()
                            : ordered_json::parse(m.config_json);
  ordered_json arts = ordered_json::array();
  for (const auto& a : m.artifacts)
    arts.push_back({{"path", a.path}, {"bytes", a.bytes}, {"fnv64", a.fnv64}});
  j["artifacts"] = std::move(arts);
  ordered_json times = ordered_json::object();
  for (const auto& [name, ms] : m.timings_ms) times[name] = ms;
  j["timings_ms"] = std::move(times);
  j["errors"] = m.errors;
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace usim

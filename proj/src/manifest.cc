#include "corpusforge/manifest.h"

#include <chrono>
#include <ctime>

#include "corpusforge/atomic_file.h"
#include "corpusforge/hashing.h"

#ifndef CORPUSFORGE_VERSION
#define CORPUSFORGE_VERSION "0.0.0"
#endif

namespace corpusforge {
namespace {

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view ToolVersion() { return CORPUSFORGE_VERSION; }

PipelineManifest::PipelineManifest(std::string stage)
    : stage_(std::move(stage)), started_at_(UtcNow()) {}

void PipelineManifest::AddInput(const std::filesystem::path& path) {
  inputs_.emplace_back(path.string(), Sha256File(path));
}

std::filesystem::path PipelineManifest::PathFor(const std::filesystem::path& artifact) {
  std::filesystem::path p = artifact;
  p += ".manifest.json";
  return p;
}

nlohmann::ordered_json PipelineManifest::ToJson(const std::filesystem::path& artifact) const {
  nlohmann::ordered_json j;
  j["stage"] = stage_;
  j["tool_version"] = ToolVersion();
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : inputs_) {
    j["inputs"].push_back({{"path", path}, {"sha256", digest}});
  }
  j["output"] = {{"path", artifact.string()}, {"sha256", Sha256File(artifact)}};
  j["config"] = config_;
  for (const auto& [key, value] : extra_.items()) j[key] = value;
  j["started_at"] = started_at_;
  j["finished_at"] = UtcNow();
  return j;
}

void PipelineManifest::WriteFor(const std::filesystem::path& artifact) const {
  WriteFileAtomic(PathFor(artifact), ToJson(artifact).dump(2) + "\n");
}

}  // namespace corpusforge

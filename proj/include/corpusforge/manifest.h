#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace corpusforge {

std::string_view ToolVersion();

// Reproducibility record written beside every output artifact as
// "<artifact>.manifest.json".
class PipelineManifest {
 public:
  explicit PipelineManifest(std::string stage);

  void AddInput(const std::filesystem::path& path);
  void SetConfig(nlohmann::json config) { config_ = std::move(config); }
  // Extra top-level fields (e.g. batch metadata for the trainer).
  void Set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  // Hashes `artifact` and writes its manifest atomically.
  void WriteFor(const std::filesystem::path& artifact) const;
  nlohmann::ordered_json ToJson(const std::filesystem::path& artifact) const;

  static std::filesystem::path PathFor(const std::filesystem::path& artifact);

 private:
  std::string stage_;
  std::string started_at_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json extra_ = nlohmann::json::object();
};

}  // namespace corpusforge

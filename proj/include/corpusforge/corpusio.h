#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "corpusforge/atomic_file.h"

namespace corpusforge {

// One corpus record (one blog post).
struct Document {
  std::string id;
  std::string text;
  std::map<std::string, std::string> meta;

  bool operator==(const Document&) const = default;
};

// Parses one JSON Lines record. `line_number` is 1-based and `byte_offset`
// is the offset of the line start; both only feed error messages.
Document ParseRecord(std::string_view line, std::size_t line_number,
                     std::size_t byte_offset);

// Serializes a document as one line (without the trailing LF).
std::string FormatRecord(const Document& doc);

// Lazy single-pass reader over a .jsonl corpus. Memory use is bounded by the
// longest line, not by the corpus.
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path& path);

  // Next document in file order, or nullopt at end of file. Throws DataError
  // on malformed records.
  std::optional<Document> Next();

  std::size_t line_number() const { return line_number_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_number_ = 0;
  std::size_t byte_offset_ = 0;
};

// Streaming writer; output becomes visible on Commit().
class CorpusWriter {
 public:
  explicit CorpusWriter(const std::filesystem::path& path);

  void Write(const Document& doc);
  // Returns the number of records written.
  std::size_t Commit();
  std::size_t count() const { return count_; }

 private:
  AtomicOutputFile file_;
  std::size_t count_ = 0;
};

std::vector<Document> ReadCorpus(const std::filesystem::path& path);
std::size_t WriteCorpus(const std::vector<Document>& docs,
                        const std::filesystem::path& path);

struct CorpusSplit {
  std::vector<Document> train;
  std::vector<Document> validation;
  double fraction = 0;
  std::uint64_t seed = 0;
};

// True when `id` lands in the validation side. Validates `fraction`.
bool AssignToValidation(std::string_view id, double fraction, std::uint64_t seed);

CorpusSplit SplitCorpus(const std::vector<Document>& docs, double fraction,
                        std::uint64_t seed);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
};

// Streaming form used by the CLI.
SplitCounts SplitCorpus(CorpusReader& reader, double fraction, std::uint64_t seed,
                        const std::function<void(const Document&)>& to_train,
                        const std::function<void(const Document&)>& to_validation);

}  // namespace corpusforge

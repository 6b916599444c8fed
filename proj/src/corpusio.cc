#include "corpusforge/corpusio.h"

#include <cmath>
#include <nlohmann/json.hpp>

#include "corpusforge/error.h"
#include "corpusforge/hashing.h"
#include "corpusforge/utf8.h"

namespace corpusforge {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSplitDomain = 0x73706c69745f6964ULL;  // "split_id"

std::string Where(std::size_t byte_offset) {
  return " (byte offset " + std::to_string(byte_offset) + ")";
}

[[noreturn]] void Malformed(std::size_t line_number, std::size_t byte_offset,
                            const std::string& what) {
  throw DataError("line " + std::to_string(line_number) + ": " + what +
                  Where(byte_offset));
}

}  // namespace

Document ParseRecord(std::string_view line, std::size_t line_number,
                     std::size_t byte_offset) {
  if (auto bad = utf8::FindInvalid(line)) {
    // Recover the id from a sanitized copy so the message can name the record.
    json probe = json::parse(utf8::Sanitize(line), nullptr, false);
    if (probe.is_object() && probe.contains("id") && probe["id"].is_string()) {
      throw DataError("record '" + probe["id"].get<std::string>() +
                      "': invalid UTF-8 at byte " +
                      std::to_string(byte_offset + *bad));
    }
    Malformed(line_number, byte_offset, "invalid UTF-8");
  }
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded()) Malformed(line_number, byte_offset, "invalid JSON");
  if (!record.is_object()) Malformed(line_number, byte_offset, "record is not an object");

  Document doc;
  auto id = record.find("id");
  if (id == record.end()) Malformed(line_number, byte_offset, "missing field 'id'");
  if (!id->is_string() || id->get_ref<const std::string&>().empty()) {
    Malformed(line_number, byte_offset, "field 'id' must be a non-empty string");
  }
  doc.id = id->get<std::string>();

  auto text = record.find("text");
  if (text == record.end()) Malformed(line_number, byte_offset, "missing field 'text'");
  if (!text->is_string()) Malformed(line_number, byte_offset, "field 'text' must be a string");
  doc.text = text->get<std::string>();
  if (doc.text.find('\0') != std::string::npos) {
    throw DataError("record '" + doc.id + "': text contains NUL");
  }

  if (auto meta = record.find("meta"); meta != record.end() && !meta->is_null()) {
    if (!meta->is_object()) Malformed(line_number, byte_offset, "field 'meta' must be an object");
    for (const auto& [key, value] : meta->items()) {
      if (!value.is_string()) {
        Malformed(line_number, byte_offset, "meta value '" + key + "' must be a string");
      }
      doc.meta.emplace(key, value.get<std::string>());
    }
  }
  return doc;
}

std::string FormatRecord(const Document& doc) {
  nlohmann::ordered_json record;
  record["id"] = doc.id;
  record["text"] = doc.text;
  if (!doc.meta.empty()) record["meta"] = doc.meta;
  return record.dump(-1, ' ', false, json::error_handler_t::strict);
}

CorpusReader::CorpusReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open corpus " + path.string());
}

std::optional<Document> CorpusReader::Next() {
  if (!std::getline(in_, line_)) {
    if (in_.bad()) throw IoError("read error in " + path_.string());
    return std::nullopt;
  }
  ++line_number_;
  const std::size_t offset = byte_offset_;
  byte_offset_ += line_.size() + 1;
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  return ParseRecord(line_, line_number_, offset);
}

CorpusWriter::CorpusWriter(const std::filesystem::path& path) : file_(path) {}

void CorpusWriter::Write(const Document& doc) {
  if (!utf8::IsValid(doc.id) || !utf8::IsValid(doc.text)) {
    throw DataError("record '" + utf8::Sanitize(doc.id) + "': invalid UTF-8");
  }
  file_.stream() << FormatRecord(doc) << '\n';
  if (!file_.stream()) {
    throw IoError("write to " + file_.path().string() + " failed after " +
                  std::to_string(count_) + " records");
  }
  ++count_;
}

std::size_t CorpusWriter::Commit() {
  file_.Commit();
  return count_;
}

std::vector<Document> ReadCorpus(const std::filesystem::path& path) {
  CorpusReader reader(path);
  std::vector<Document> docs;
  while (auto doc = reader.Next()) docs.push_back(std::move(*doc));
  return docs;
}

std::size_t WriteCorpus(const std::vector<Document>& docs,
                        const std::filesystem::path& path) {
  CorpusWriter writer(path);
  for (const auto& doc : docs) writer.Write(doc);
  return writer.Commit();
}

bool AssignToValidation(std::string_view id, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ContractError("split fraction must lie strictly between 0 and 1, got " +
                        std::to_string(fraction));
  }
  // fraction * 2^64 fits in u64 because fraction < 1.
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(fraction, 64));
  return KeyedHash(seed, kSplitDomain, id) < threshold;
}

CorpusSplit SplitCorpus(const std::vector<Document>& docs, double fraction,
                        std::uint64_t seed) {
  CorpusSplit split;
  split.fraction = fraction;
  split.seed = seed;
  AssignToValidation("", fraction, seed);  // validates before any work
  for (const auto& doc : docs) {
    (AssignToValidation(doc.id, fraction, seed) ? split.validation : split.train)
        .push_back(doc);
  }
  return split;
}

SplitCounts SplitCorpus(CorpusReader& reader, double fraction, std::uint64_t seed,
                        const std::function<void(const Document&)>& to_train,
                        const std::function<void(const Document&)>& to_validation) {
  AssignToValidation("", fraction, seed);
  SplitCounts counts;
  while (auto doc = reader.Next()) {
    if (AssignToValidation(doc->id, fraction, seed)) {
      to_validation(*doc);
      ++counts.validation;
    } else {
      to_train(*doc);
      ++counts.train;
    }
  }
  return counts;
}

}  // namespace corpusforge

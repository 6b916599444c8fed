#include "corpusforge/masking.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "corpusforge/error.h"
#include "corpusforge/hashing.h"
#include "corpusforge/parallel.h"

namespace corpusforge {
namespace {

constexpr std::size_t kChunkDocs = 2048;

bool Maskable(TokenId id, std::int32_t word) { return word != kNoWord && !Vocab::IsSpecial(id); }

void Tally(const PretrainingExample& ex, EpochStats& stats) {
  ++stats.examples;
  for (std::size_t i = 0; i < ex.input_ids.size(); ++i) {
    if (ex.labels[i] != kIgnoreLabel) ++stats.labeled_tokens;
    if (Maskable(ex.labels[i] != kIgnoreLabel ? ex.labels[i] : ex.input_ids[i], ex.word_ids[i])) {
      ++stats.maskable_tokens;
    }
  }
}

void Count(const ExampleResult& r, EpochStats& stats) {
  ++stats.documents;
  switch (r.status) {
    case ExampleStatus::kOk:
      Tally(r.example, stats);
      break;
    case ExampleStatus::kEmpty:
      ++stats.skipped_empty;
      break;
    case ExampleStatus::kUnmaskable:
      ++stats.skipped_unmaskable;
      break;
  }
}

void AppendInts(std::string& out, std::span<const std::int32_t> values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  out += ']';
}

}  // namespace

void MaskingConfig::Validate() const {
  if (!(rate > 0.0 && rate <= 1.0)) throw ContractError("masking rate must lie in (0, 1]");
  for (double p : {mask_prob, random_prob, keep_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("corruption probabilities must lie in [0, 1]");
  }
  if (std::abs(mask_prob + random_prob + keep_prob - 1.0) > 1e-12) {
    throw ContractError("mask_prob + random_prob + keep_prob must equal 1");
  }
  if (min_len == 0 || max_len < 3 || min_len > max_len - 2) {
    throw ContractError("segment lengths must satisfy 0 < min_len <= max_len - 2");
  }
}

nlohmann::json MaskingConfig::ToJson() const {
  return {{"rate", rate},         {"mask_prob", mask_prob}, {"random_prob", random_prob},
          {"keep_prob", keep_prob}, {"max_len", max_len},     {"min_len", min_len},
          {"epoch_seed", epoch_seed}};
}

MaskingConfig MaskingConfig::FromJson(const nlohmann::json& j) {
  MaskingConfig c;
  c.rate = j.value("rate", c.rate);
  c.mask_prob = j.value("mask_prob", c.mask_prob);
  c.random_prob = j.value("random_prob", c.random_prob);
  c.keep_prob = j.value("keep_prob", c.keep_prob);
  c.max_len = j.value("max_len", c.max_len);
  c.min_len = j.value("min_len", c.min_len);
  c.epoch_seed = j.value("epoch_seed", c.epoch_seed);
  c.Validate();
  return c;
}

EncodedSequence SampleSegment(const EncodedSequence& doc, const MaskingConfig& config, Rng& rng) {
  const std::size_t n = doc.size();
  if (n == 0) return {};
  const auto length = static_cast<std::size_t>(rng.Between(
      static_cast<std::int64_t>(config.min_len), static_cast<std::int64_t>(config.max_len - 2)));
  if (n <= length) return doc;

  auto start = static_cast<std::size_t>(rng.Between(0, static_cast<std::int64_t>(n - length)));
  while (start > 0 && doc.word_ids[start] != kNoWord && doc.word_ids[start - 1] == doc.word_ids[start]) {
    --start;
  }
  EncodedSequence slice;
  slice.ids.assign(doc.ids.begin() + start, doc.ids.begin() + start + length);
  slice.word_ids.assign(doc.word_ids.begin() + start, doc.word_ids.begin() + start + length);
  return slice;
}

std::vector<std::int32_t> SelectWords(const EncodedSequence& seq, double rate, Rng& rng) {
  std::vector<std::int32_t> words;
  std::vector<std::size_t> word_sizes;
  std::unordered_set<std::int32_t> excluded;
  std::size_t maskable = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const std::int32_t w = seq.word_ids[i];
    if (w == kNoWord) continue;
    if (Vocab::IsSpecial(seq.ids[i])) {
      excluded.insert(w);
      continue;
    }
    if (words.empty() || words.back() != w) {
      words.push_back(w);
      word_sizes.push_back(0);
    }
    ++word_sizes.back();
  }
  // A word holding a special piece is dropped entirely so selection stays whole-word.
  std::vector<std::pair<std::int32_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (excluded.contains(words[i])) continue;
    candidates.emplace_back(words[i], word_sizes[i]);
    maskable += word_sizes[i];
  }
  if (candidates.empty()) throw ContractError("segment has no maskable tokens");

  // The epsilon absorbs products like 0.15 * 20 = 3.0000000000000004.
  const auto target = static_cast<std::size_t>(
      std::max(1.0, std::ceil(rate * static_cast<double>(maskable) - 1e-9)));
  rng.Shuffle(std::span(candidates));
  std::vector<std::int32_t> selected;
  std::size_t covered = 0;
  for (const auto& [word, size] : candidates) {
    if (covered >= target) break;
    selected.push_back(word);
    covered += size;
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

PretrainingExample Corrupt(const EncodedSequence& seq, std::span<const std::int32_t> selection,
                           const MaskingConfig& config, std::size_t vocab_size, Rng& rng) {
  PretrainingExample ex;
  ex.input_ids = seq.ids;
  ex.labels.assign(seq.size(), kIgnoreLabel);
  ex.word_ids = seq.word_ids;
  const std::unordered_set<std::int32_t> chosen(selection.begin(), selection.end());
  const std::uint64_t random_span =
      vocab_size > static_cast<std::size_t>(kNumSpecials) ? vocab_size - kNumSpecials : 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!Maskable(seq.ids[i], seq.word_ids[i]) || !chosen.contains(seq.word_ids[i])) continue;
    ex.labels[i] = seq.ids[i];
    const double u = rng.Unit();
    if (u < config.mask_prob) {
      ex.input_ids[i] = kMaskId;
    } else if (u < config.mask_prob + config.random_prob) {
      ex.input_ids[i] = random_span == 0 ? kMaskId
                                         : kNumSpecials + static_cast<TokenId>(rng.Below(random_span));
    }
  }
  return ex;
}

std::uint64_t DocumentSeed(const MaskingConfig& config, std::uint64_t epoch_index,
                           std::string_view doc_id) {
  return KeyedHash(config.epoch_seed, epoch_index, doc_id);
}

ExampleResult BuildExample(const Document& doc, const WordPieceTokenizer& tokenizer,
                           const MaskingConfig& config, std::uint64_t epoch_index) {
  ExampleResult result;
  const EncodedSequence tokens = tokenizer.Encode(doc.text, /*add_specials=*/false);
  if (tokens.size() == 0) {
    result.status = ExampleStatus::kEmpty;
    return result;
  }
  Rng rng(DocumentSeed(config, epoch_index, doc.id));
  const EncodedSequence segment = SampleSegment(tokens, config, rng);

  EncodedSequence wrapped;
  wrapped.ids.reserve(segment.size() + 2);
  wrapped.word_ids.reserve(segment.size() + 2);
  wrapped.ids.push_back(kClsId);
  wrapped.word_ids.push_back(kNoWord);
  wrapped.ids.insert(wrapped.ids.end(), segment.ids.begin(), segment.ids.end());
  wrapped.word_ids.insert(wrapped.word_ids.end(), segment.word_ids.begin(), segment.word_ids.end());
  wrapped.ids.push_back(kSepId);
  wrapped.word_ids.push_back(kNoWord);

  const bool any_maskable = std::any_of(segment.ids.begin(), segment.ids.end(),
                                        [](TokenId id) { return !Vocab::IsSpecial(id); });
  if (!any_maskable) {
    result.status = ExampleStatus::kUnmaskable;
    return result;
  }
  const auto selection = SelectWords(wrapped, config.rate, rng);
  result.example = Corrupt(wrapped, selection, config, tokenizer.vocab().size(), rng);
  return result;
}

std::vector<PretrainingExample> BuildEpoch(std::span<const Document> docs,
                                           const WordPieceTokenizer& tokenizer,
                                           const MaskingConfig& config, std::uint64_t epoch_index,
                                           unsigned threads, EpochStats* stats) {
  config.Validate();
  auto results = ParallelMap<ExampleResult>(docs.size(), threads, [&](std::size_t i) {
    return BuildExample(docs[i], tokenizer, config, epoch_index);
  });
  EpochStats local;
  std::vector<PretrainingExample> out;
  out.reserve(results.size());
  for (auto& r : results) {
    Count(r, local);
    if (r.status == ExampleStatus::kOk) out.push_back(std::move(r.example));
  }
  if (stats) *stats = local;
  return out;
}

EpochStats WriteEpoch(CorpusReader& reader, const WordPieceTokenizer& tokenizer,
                      const MaskingConfig& config, std::uint64_t epoch_index, unsigned threads,
                      std::ostream& out) {
  config.Validate();
  EpochStats stats;
  std::vector<Document> chunk;
  for (;;) {
    chunk.clear();
    while (chunk.size() < kChunkDocs) {
      auto doc = reader.Next();
      if (!doc) break;
      chunk.push_back(std::move(*doc));
    }
    if (chunk.empty()) break;
    auto results = ParallelMap<ExampleResult>(chunk.size(), threads, [&](std::size_t i) {
      return BuildExample(chunk[i], tokenizer, config, epoch_index);
    });
    for (const auto& r : results) {
      Count(r, stats);
      if (r.status == ExampleStatus::kOk) out << FormatExample(r.example) << '\n';
    }
    if (!out) throw IoError("write failed after " + std::to_string(stats.examples) + " examples");
  }
  return stats;
}

std::string FormatExample(const PretrainingExample& example) {
  std::string line = "{\"input_ids\":";
  AppendInts(line, example.input_ids);
  line += ",\"labels\":";
  AppendInts(line, example.labels);
  line += ",\"word_ids\":";
  AppendInts(line, example.word_ids);
  line += '}';
  return line;
}

PretrainingExample ParseExample(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("malformed batch record");
  PretrainingExample ex;
  try {
    ex.input_ids = j.at("input_ids").get<std::vector<TokenId>>();
    ex.labels = j.at("labels").get<std::vector<TokenId>>();
    ex.word_ids = j.at("word_ids").get<std::vector<std::int32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed batch record: ") + e.what());
  }
  if (ex.labels.size() != ex.input_ids.size() || ex.word_ids.size() != ex.input_ids.size()) {
    throw DataError("batch record arrays differ in length");
  }
  return ex;
}

nlohmann::json BatchManifest(const Vocab& vocab, const MaskingConfig& config,
                             std::uint64_t epoch_index, const EpochStats& stats) {
  return {{"format", "corpusforge-mlm-batch"},
          {"version", 1},
          {"vocab_hash", vocab.Digest()},
          {"vocab_size", vocab.size()},
          {"config", config.ToJson()},
          {"epoch_index", epoch_index},
          {"example_count", stats.examples},
          {"ignore_label", kIgnoreLabel},
          {"skipped_empty", stats.skipped_empty},
          {"skipped_unmaskable", stats.skipped_unmaskable}};
}

}  // namespace corpusforge

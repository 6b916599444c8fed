#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusforge/corpusio.h"
#include "corpusforge/rng.h"
#include "corpusforge/tokenizer.h"

namespace corpusforge {

inline constexpr TokenId kIgnoreLabel = -100;

struct MaskingConfig {
  double rate = 0.15;
  double mask_prob = 0.80;
  double random_prob = 0.10;
  double keep_prob = 0.10;
  std::size_t max_len = 512;
  std::size_t min_len = 16;
  std::uint64_t epoch_seed = 0;

  // Throws ContractError when the probabilities or lengths are inconsistent.
  void Validate() const;
  nlohmann::json ToJson() const;
  static MaskingConfig FromJson(const nlohmann::json& j);
};

// One MLM training example: a single contiguous segment, CLS ... SEP.
// There is no segment pair and no next-sentence label.
struct PretrainingExample {
  std::vector<TokenId> input_ids;
  std::vector<TokenId> labels;  // original id where corrupted, else kIgnoreLabel
  std::vector<std::int32_t> word_ids;

  bool operator==(const PretrainingExample&) const = default;
};

// Contiguous slice of a document's tokens (no specials). Length is drawn
// uniformly from [min_len, max_len - 2]; documents no longer than the draw
// are returned whole. The start is moved left to the beginning of its word.
EncodedSequence SampleSegment(const EncodedSequence& doc, const MaskingConfig& config, Rng& rng);

// Word ids chosen for corruption. Words are shuffled and taken until they
// cover at least ceil(rate * maskable tokens); at least one word is taken.
// Specials (including [UNK]) are never maskable. Throws ContractError when
// nothing is maskable.
std::vector<std::int32_t> SelectWords(const EncodedSequence& seq, double rate, Rng& rng);

// Applies the mask / random / keep corruption to every token of the selected
// words. `vocab_size` bounds the random replacement, which never draws a
// special id.
PretrainingExample Corrupt(const EncodedSequence& seq, std::span<const std::int32_t> selection,
                           const MaskingConfig& config, std::size_t vocab_size, Rng& rng);

// Per-document generator seed for one epoch.
std::uint64_t DocumentSeed(const MaskingConfig& config, std::uint64_t epoch_index,
                           std::string_view doc_id);

enum class ExampleStatus { kOk, kEmpty, kUnmaskable };

struct ExampleResult {
  ExampleStatus status = ExampleStatus::kOk;
  PretrainingExample example;
};

// Full per-document path: encode, sample, select, corrupt.
ExampleResult BuildExample(const Document& doc, const WordPieceTokenizer& tokenizer,
                           const MaskingConfig& config, std::uint64_t epoch_index);

struct EpochStats {
  std::size_t documents = 0;
  std::size_t examples = 0;
  std::size_t skipped_empty = 0;
  std::size_t skipped_unmaskable = 0;
  std::size_t labeled_tokens = 0;
  std::size_t maskable_tokens = 0;
};

std::vector<PretrainingExample> BuildEpoch(std::span<const Document> docs,
                                           const WordPieceTokenizer& tokenizer,
                                           const MaskingConfig& config,
                                           std::uint64_t epoch_index, unsigned threads = 1,
                                           EpochStats* stats = nullptr);

// Streams an epoch to `out` as JSON Lines. Output bytes do not depend on
// `threads`.
EpochStats WriteEpoch(CorpusReader& reader, const WordPieceTokenizer& tokenizer,
                      const MaskingConfig& config, std::uint64_t epoch_index, unsigned threads,
                      std::ostream& out);

std::string FormatExample(const PretrainingExample& example);
PretrainingExample ParseExample(std::string_view line);

// Batch-file metadata consumed by the trainer.
nlohmann::json BatchManifest(const Vocab& vocab, const MaskingConfig& config,
                             std::uint64_t epoch_index, const EpochStats& stats);

}  // namespace corpusforge

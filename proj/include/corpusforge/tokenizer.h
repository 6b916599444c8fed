#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpusforge/corpusio.h"

namespace corpusforge {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;
inline constexpr TokenId kMaskId = 4;
inline constexpr TokenId kNumSpecials = 5;

// word_ids entry for CLS/SEP/PAD.
inline constexpr std::int32_t kNoWord = -1;

inline constexpr std::string_view kContinuationPrefix = "##";

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

// Ordered subword inventory; line number in vocab.txt is the token id.
//
// Ids 0-4 are always [PAD] [UNK] [CLS] [SEP] [MASK]. Tokens shaped like
// "<NUM>" are atomic: the pre-tokenizer never splits them.
class Vocab {
 public:
  static const std::vector<std::string>& SpecialTokens();

  // Throws ContractError on duplicates or misplaced specials.
  explicit Vocab(std::vector<std::string> tokens);

  static Vocab Load(const std::filesystem::path& path);
  static Vocab Parse(std::string_view text);
  // One token per line, LF-terminated.
  std::string Serialize() const;
  void Save(const std::filesystem::path& path) const;
  std::string Digest() const;

  std::size_t size() const { return tokens_.size(); }
  const std::string& Token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }

  static bool IsSpecial(TokenId id) { return id >= 0 && id < kNumSpecials; }
  bool IsContinuation(TokenId id) const;
  const std::vector<std::string>& atomic_tokens() const { return atomic_; }
  static bool LooksAtomic(std::string_view token);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> index_;
  std::vector<std::string> atomic_;
};

struct PreToken {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source, half-open
  std::size_t end = 0;

  bool operator==(const PreToken&) const = default;
};

struct PreTokenizerOptions {
  // When false, ZWNJ (U+200C) stays inside its word as a half-space.
  bool zwnj_is_split = false;
  // Strings emitted as a single pre-token wherever they occur.
  std::vector<std::string> atomic_tokens{"<NUM>"};
};

// Splits on Unicode whitespace and isolates each punctuation code point.
std::vector<PreToken> PreTokenize(std::string_view text,
                                  const PreTokenizerOptions& options = {});

struct EncodedSequence {
  std::vector<TokenId> ids;
  // Source pre-token index per token; kNoWord for specials.
  std::vector<std::int32_t> word_ids;

  std::size_t size() const { return ids.size(); }
  bool operator==(const EncodedSequence&) const = default;
};

struct WordPieceTrainerOptions {
  std::size_t vocab_size = 50000;
  std::uint64_t min_frequency = 2;
  std::size_t max_word_chars = 100;
  PreTokenizerOptions pretokenizer;
  unsigned threads = 1;
};

// Pre-token frequency table gathered from a corpus.
class WordCounts {
 public:
  void Add(std::string_view text, const PreTokenizerOptions& options);
  void Merge(const WordCounts& other);

  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

 private:
  std::map<std::string, std::uint64_t> counts_;
};

WordCounts CountWords(std::span<const Document> docs,
                      const WordPieceTrainerOptions& options);

// Greedy pair merging under the likelihood score
//   count(ab) / (count(a) * count(b))
// with ties broken by the lexicographically smallest merged string.
// Throws ContractError on an empty corpus or an undersized vocab budget.
Vocab TrainWordPiece(const WordCounts& words, const WordPieceTrainerOptions& options);
Vocab TrainWordPiece(std::span<const Document> docs,
                     const WordPieceTrainerOptions& options);

// Size of the character-level vocabulary training starts from.
std::size_t BaseVocabSize(const WordCounts& words, const WordPieceTrainerOptions& options);

class WordPieceTokenizer {
 public:
  explicit WordPieceTokenizer(Vocab vocab, std::size_t max_word_chars = 100,
                              bool zwnj_is_split = false);

  const Vocab& vocab() const { return vocab_; }

  // Greedy longest-match-first per pre-token; a word with no matching prefix
  // at some position becomes a single [UNK].
  EncodedSequence Encode(std::string_view text, bool add_specials = false) const;

  // Word pieces for one pre-token (no specials).
  std::vector<TokenId> EncodeWord(std::string_view word) const;

  // Strips specials and continuation prefixes, joins words with single
  // spaces. Throws ContractError on an out-of-range id.
  std::string Decode(std::span<const TokenId> ids) const;

 private:
  Vocab vocab_;
  std::size_t max_word_chars_;
  PreTokenizerOptions pretokenizer_;
};

}  // namespace corpusforge

#include "corpusforge/tokenizer.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "corpusforge/atomic_file.h"
#include "corpusforge/error.h"
#include "corpusforge/hashing.h"
#include "corpusforge/parallel.h"
#include "corpusforge/unicode.h"
#include "corpusforge/utf8.h"

namespace corpusforge {

// ---------------------------------------------------------------------------
// Vocab

const std::vector<std::string>& Vocab::SpecialTokens() {
  static const std::vector<std::string> specials{"[PAD]", "[UNK]", "[CLS]", "[SEP]",
                                                 "[MASK]"};
  return specials;
}

bool Vocab::LooksAtomic(std::string_view token) {
  return token.size() >= 3 && token.front() == '<' && token.back() == '>';
}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  const auto& specials = SpecialTokens();
  if (tokens_.size() < specials.size()) {
    throw ContractError("vocab must start with the five special tokens");
  }
  for (std::size_t i = 0; i < specials.size(); ++i) {
    if (tokens_[i] != specials[i]) {
      throw ContractError("vocab id " + std::to_string(i) + " must be " + specials[i] +
                          ", found '" + tokens_[i] + "'");
    }
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty() || t.find_first_of("\n\r") != std::string::npos) {
      throw ContractError("vocab token " + std::to_string(i) + " is empty or contains a newline");
    }
    if (!index_.emplace(t, static_cast<TokenId>(i)).second) {
      throw ContractError("duplicate vocab token '" + t + "' at id " + std::to_string(i));
    }
    if (i >= specials.size() && LooksAtomic(t)) atomic_.push_back(t);
  }
}

Vocab Vocab::Parse(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    tokens.emplace_back(line);
    pos = eol + 1;
  }
  return Vocab(std::move(tokens));
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  if (!utf8::IsValid(text)) throw DataError("vocab " + path.string() + " is not valid UTF-8");
  return Parse(text);
}

std::string Vocab::Serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

void Vocab::Save(const std::filesystem::path& path) const {
  WriteFileAtomic(path, Serialize());
}

std::string Vocab::Digest() const { return Sha256Hex(Serialize()); }

std::optional<TokenId> Vocab::Find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocab::IsContinuation(TokenId id) const {
  return !IsSpecial(id) && Token(id).starts_with(kContinuationPrefix) &&
         Token(id).size() > kContinuationPrefix.size();
}

// ---------------------------------------------------------------------------
// Pre-tokenization

std::vector<PreToken> PreTokenize(std::string_view text, const PreTokenizerOptions& options) {
  std::vector<PreToken> out;
  std::size_t word_begin = std::string_view::npos;
  auto flush = [&](std::size_t end) {
    if (word_begin != std::string_view::npos && end > word_begin) {
      out.push_back({std::string(text.substr(word_begin, end - word_begin)), word_begin, end});
    }
    word_begin = std::string_view::npos;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    bool atomic = false;
    for (const auto& token : options.atomic_tokens) {
      if (!token.empty() && text.substr(start).starts_with(token)) {
        flush(start);
        out.push_back({token, start, start + token.size()});
        pos = start + token.size();
        atomic = true;
        break;
      }
    }
    if (atomic) continue;

    const char32_t cp = utf8::Next(text, pos);
    if (unicode::IsWhitespace(cp) || (options.zwnj_is_split && cp == unicode::kZwnj)) {
      flush(start);
    } else if (unicode::IsPunctuation(cp)) {
      flush(start);
      out.push_back({std::string(text.substr(start, pos - start)), start, pos});
    } else if (word_begin == std::string_view::npos) {
      word_begin = start;
    }
  }
  flush(text.size());
  return out;
}

// ---------------------------------------------------------------------------
// Training

void WordCounts::Add(std::string_view text, const PreTokenizerOptions& options) {
  for (auto& pre : PreTokenize(text, options)) {
    if (std::find(options.atomic_tokens.begin(), options.atomic_tokens.end(), pre.text) !=
        options.atomic_tokens.end()) {
      continue;
    }
    ++counts_[std::move(pre.text)];
  }
}

void WordCounts::Merge(const WordCounts& other) {
  for (const auto& [word, n] : other.counts_) counts_[word] += n;
}

WordCounts CountWords(std::span<const Document> docs, const WordPieceTrainerOptions& options) {
  const unsigned threads = std::max(1u, options.threads);
  std::vector<WordCounts> partial(threads);
  ParallelBlocks(docs.size(), threads, [&](std::size_t begin, std::size_t end, unsigned worker) {
    for (std::size_t i = begin; i < end; ++i) partial[worker].Add(docs[i].text, options.pretokenizer);
  });
  WordCounts total;
  for (const auto& p : partial) total.Merge(p);
  return total;
}

namespace {

std::set<char32_t> Alphabet(const WordCounts& words, std::size_t max_word_chars) {
  std::set<char32_t> alphabet;
  for (const auto& [word, n] : words.counts()) {
    const std::u32string cps = utf8::Decode(word);
    if (cps.size() > max_word_chars) continue;
    alphabet.insert(cps.begin(), cps.end());
  }
  return alphabet;
}

std::string StripContinuation(const std::string& token) {
  return token.starts_with(kContinuationPrefix) ? token.substr(kContinuationPrefix.size())
                                                : token;
}

using PairKey = std::uint64_t;

PairKey MakePair(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}
TokenId PairFirst(PairKey k) { return static_cast<TokenId>(k >> 32); }
TokenId PairSecond(PairKey k) { return static_cast<TokenId>(k & 0xFFFFFFFFu); }

struct TrainingWord {
  std::vector<TokenId> symbols;
  std::uint64_t freq;
};

class MergeState {
 public:
  MergeState(std::vector<std::string> tokens, std::vector<TrainingWord> words)
      : tokens_(std::move(tokens)), words_(std::move(words)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      index_.emplace(tokens_[i], static_cast<TokenId>(i));
    }
    symbol_counts_.assign(tokens_.size(), 0);
    seen_stamp_.assign(words_.size(), 0);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const auto& word = words_[w];
      for (TokenId s : word.symbols) symbol_counts_[s] += word.freq;
      AddPairs(static_cast<std::uint32_t>(w), /*only_with=*/-1);
    }
  }

  std::vector<std::string> Run(std::size_t vocab_size, std::uint64_t min_frequency) {
    while (tokens_.size() < vocab_size) {
      auto best = SelectPair(min_frequency);
      if (!best) break;
      ApplyMerge(*best);
    }
    return std::move(tokens_);
  }

 private:
  // Lexicographic order over (score desc, merged string, left, right).
  bool Better(PairKey x, std::uint64_t cx, PairKey y, std::uint64_t cy) const {
    using U128 = unsigned __int128;
    const U128 lhs = static_cast<U128>(cx) * symbol_counts_[PairFirst(y)] * symbol_counts_[PairSecond(y)];
    const U128 rhs = static_cast<U128>(cy) * symbol_counts_[PairFirst(x)] * symbol_counts_[PairSecond(x)];
    if (lhs != rhs) return lhs > rhs;
    const std::string mx = Merged(x);
    const std::string my = Merged(y);
    if (mx != my) return mx < my;
    if (tokens_[PairFirst(x)] != tokens_[PairFirst(y)]) {
      return tokens_[PairFirst(x)] < tokens_[PairFirst(y)];
    }
    return tokens_[PairSecond(x)] < tokens_[PairSecond(y)];
  }

  std::string Merged(PairKey k) const {
    return tokens_[PairFirst(k)] + StripContinuation(tokens_[PairSecond(k)]);
  }

  std::optional<PairKey> SelectPair(std::uint64_t min_frequency) const {
    std::optional<PairKey> best;
    std::uint64_t best_count = 0;
    for (const auto& [key, count] : pair_counts_) {
      if (count < min_frequency || count == 0) continue;
      if (!best || Better(key, count, *best, best_count)) {
        best = key;
        best_count = count;
      }
    }
    return best;
  }

  void AddPairs(std::uint32_t w, TokenId only_with) {
    const auto& word = words_[w];
    for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
      const PairKey key = MakePair(word.symbols[i], word.symbols[i + 1]);
      pair_counts_[key] += word.freq;
      if (only_with < 0 || word.symbols[i] == only_with || word.symbols[i + 1] == only_with) {
        pair_words_[key].push_back(w);
      }
    }
  }

  void RemovePairs(std::uint32_t w) {
    const auto& word = words_[w];
    for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
      const PairKey key = MakePair(word.symbols[i], word.symbols[i + 1]);
      auto it = pair_counts_.find(key);
      it->second -= word.freq;
      if (it->second == 0) pair_counts_.erase(it);
    }
  }

  void ApplyMerge(PairKey key) {
    const TokenId a = PairFirst(key);
    const TokenId b = PairSecond(key);
    const std::string merged = Merged(key);
    TokenId m;
    if (auto it = index_.find(merged); it != index_.end()) {
      m = it->second;
    } else {
      m = static_cast<TokenId>(tokens_.size());
      tokens_.push_back(merged);
      index_.emplace(merged, m);
      symbol_counts_.push_back(0);
    }

    ++stamp_;
    std::vector<std::uint32_t> affected = std::move(pair_words_[key]);
    pair_words_.erase(key);
    for (std::uint32_t w : affected) {
      if (seen_stamp_[w] == stamp_) continue;
      seen_stamp_[w] = stamp_;
      auto& word = words_[w];
      bool present = false;
      for (std::size_t i = 0; i + 1 < word.symbols.size() && !present; ++i) {
        present = word.symbols[i] == a && word.symbols[i + 1] == b;
      }
      if (!present) continue;

      RemovePairs(w);
      std::vector<TokenId> next;
      next.reserve(word.symbols.size());
      for (std::size_t i = 0; i < word.symbols.size(); ++i) {
        if (i + 1 < word.symbols.size() && word.symbols[i] == a && word.symbols[i + 1] == b) {
          next.push_back(m);
          symbol_counts_[a] -= word.freq;
          symbol_counts_[b] -= word.freq;
          symbol_counts_[m] += word.freq;
          ++i;
        } else {
          next.push_back(word.symbols[i]);
        }
      }
      word.symbols = std::move(next);
      AddPairs(w, m);
    }
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<TrainingWord> words_;
  std::vector<std::uint64_t> symbol_counts_;
  std::unordered_map<PairKey, std::uint64_t> pair_counts_;
  std::unordered_map<PairKey, std::vector<std::uint32_t>> pair_words_;
  std::vector<std::uint64_t> seen_stamp_;
  std::uint64_t stamp_ = 0;
};

std::vector<std::string> BaseTokens(const WordCounts& words,
                                    const WordPieceTrainerOptions& options) {
  std::vector<std::string> tokens = Vocab::SpecialTokens();
  for (const auto& atomic : options.pretokenizer.atomic_tokens) tokens.push_back(atomic);
  const std::set<char32_t> alphabet = Alphabet(words, options.max_word_chars);
  for (char32_t cp : alphabet) tokens.push_back(utf8::Encode(std::u32string(1, cp)));
  for (char32_t cp : alphabet) {
    tokens.push_back(std::string(kContinuationPrefix) + utf8::Encode(std::u32string(1, cp)));
  }
  return tokens;
}

}  // namespace

std::size_t BaseVocabSize(const WordCounts& words, const WordPieceTrainerOptions& options) {
  return BaseTokens(words, options).size();
}

Vocab TrainWordPiece(const WordCounts& words, const WordPieceTrainerOptions& options) {
  if (words.empty()) throw ContractError("cannot train a vocabulary on an empty corpus");
  std::vector<std::string> tokens = BaseTokens(words, options);
  if (options.vocab_size < tokens.size()) {
    throw ContractError("vocab_size " + std::to_string(options.vocab_size) +
                        " is smaller than the base vocabulary (" +
                        std::to_string(tokens.size()) + " specials and characters)");
  }
  std::unordered_map<std::string, TokenId> index;
  for (std::size_t i = 0; i < tokens.size(); ++i) index.emplace(tokens[i], static_cast<TokenId>(i));

  std::vector<TrainingWord> training;
  training.reserve(words.counts().size());
  for (const auto& [word, freq] : words.counts()) {
    const std::u32string cps = utf8::Decode(word);
    if (cps.size() > options.max_word_chars) continue;
    TrainingWord tw{{}, freq};
    tw.symbols.reserve(cps.size());
    for (std::size_t i = 0; i < cps.size(); ++i) {
      std::string piece = i == 0 ? std::string() : std::string(kContinuationPrefix);
      utf8::Append(piece, cps[i]);
      tw.symbols.push_back(index.at(piece));
    }
    training.push_back(std::move(tw));
  }

  MergeState state(std::move(tokens), std::move(training));
  return Vocab(state.Run(options.vocab_size, options.min_frequency));
}

Vocab TrainWordPiece(std::span<const Document> docs, const WordPieceTrainerOptions& options) {
  return TrainWordPiece(CountWords(docs, options), options);
}

// ---------------------------------------------------------------------------
// Encoding

WordPieceTokenizer::WordPieceTokenizer(Vocab vocab, std::size_t max_word_chars,
                                       bool zwnj_is_split)
    : vocab_(std::move(vocab)), max_word_chars_(max_word_chars) {
  pretokenizer_.zwnj_is_split = zwnj_is_split;
  pretokenizer_.atomic_tokens = vocab_.atomic_tokens();
}

std::vector<TokenId> WordPieceTokenizer::EncodeWord(std::string_view word) const {
  if (auto id = vocab_.Find(word); id && Vocab::LooksAtomic(word)) return {*id};

  std::vector<std::size_t> offsets;  // byte offset of each code point, plus end
  std::size_t pos = 0;
  while (pos < word.size()) {
    offsets.push_back(pos);
    utf8::Next(word, pos);
  }
  offsets.push_back(word.size());
  const std::size_t n = offsets.size() - 1;
  if (n == 0) return {};
  if (n > max_word_chars_) return {kUnkId};

  std::vector<TokenId> pieces;
  std::string candidate;
  std::size_t start = 0;
  while (start < n) {
    std::optional<TokenId> match;
    std::size_t end = n;
    for (; end > start; --end) {
      candidate.assign(start == 0 ? "" : kContinuationPrefix);
      candidate.append(word.substr(offsets[start], offsets[end] - offsets[start]));
      match = vocab_.Find(candidate);
      if (match) break;
    }
    if (!match) return {kUnkId};
    pieces.push_back(*match);
    start = end;
  }
  return pieces;
}

EncodedSequence WordPieceTokenizer::Encode(std::string_view text, bool add_specials) const {
  EncodedSequence seq;
  if (add_specials) {
    seq.ids.push_back(kClsId);
    seq.word_ids.push_back(kNoWord);
  }
  const auto words = PreTokenize(text, pretokenizer_);
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (TokenId id : EncodeWord(words[w].text)) {
      seq.ids.push_back(id);
      seq.word_ids.push_back(static_cast<std::int32_t>(w));
    }
  }
  if (add_specials) {
    seq.ids.push_back(kSepId);
    seq.word_ids.push_back(kNoWord);
  }
  return seq;
}

std::string WordPieceTokenizer::Decode(std::span<const TokenId> ids) const {
  std::string out;
  bool in_word = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const TokenId id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) {
      throw ContractError("token id " + std::to_string(id) + " at index " + std::to_string(i) +
                          " is out of range for a vocabulary of " +
                          std::to_string(vocab_.size()));
    }
    if (Vocab::IsSpecial(id)) {
      in_word = false;
      continue;
    }
    const std::string& token = vocab_.Token(id);
    if (vocab_.IsContinuation(id)) {
      if (!in_word && !out.empty()) out += ' ';
      out += token.substr(kContinuationPrefix.size());
    } else {
      if (!out.empty()) out += ' ';
      out += token;
    }
    in_word = true;
  }
  return out;
}

}  // namespace corpusforge

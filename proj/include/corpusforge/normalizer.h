#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "corpusforge/corpusio.h"

namespace corpusforge {

// Rewrite tables for Perso-Arabic normalization.
//
// Text form (one directive per line, '#' starts a comment):
//   064A -> 06CC          map a code point to a sequence (possibly empty)
//   FB56 -> 067E,0020     multi code point image
//   strip 0640            remove a code point outright
//   number_token = <NUM>
//   repeat_threshold = 3
//   repeat_keep = 1
struct NormalizationConfig {
  std::map<char32_t, std::u32string> char_map;
  std::set<char32_t> strip_set;
  std::string number_token = "<NUM>";
  int repeat_threshold = 3;
  int repeat_keep = 1;

  static NormalizationConfig Default();
  static NormalizationConfig Parse(std::string_view text);
  std::string Dump() const;

  // Throws ContractError unless the tables form a terminating, idempotent
  // rewrite system.
  void Validate() const;
};

struct NormalizationStats {
  std::uint64_t chars_mapped = 0;
  std::uint64_t chars_stripped = 0;
  std::uint64_t numbers_replaced = 0;
  std::uint64_t repeats_collapsed = 0;

  NormalizationStats& operator+=(const NormalizationStats& o) {
    chars_mapped += o.chars_mapped;
    chars_stripped += o.chars_stripped;
    numbers_replaced += o.numbers_replaced;
    repeats_collapsed += o.repeats_collapsed;
    return *this;
  }
  bool operator==(const NormalizationStats&) const = default;
};

struct NormalizedText {
  std::string text;
  NormalizationStats stats;
};

// Compiled form of a NormalizationConfig. Immutable and shareable across
// threads.
class Normalizer {
 public:
  explicit Normalizer(NormalizationConfig config = NormalizationConfig::Default());

  const NormalizationConfig& config() const { return config_; }

  std::string MapCharacters(std::string_view text,
                            NormalizationStats* stats = nullptr) const;
  std::string ReplaceNumbers(std::string_view text,
                             NormalizationStats* stats = nullptr) const;
  std::string CollapseRepeats(std::string_view text,
                              NormalizationStats* stats = nullptr) const;

  // CollapseRepeats(ReplaceNumbers(MapCharacters(text))).
  NormalizedText Normalize(std::string_view text) const;
  Document Normalize(const Document& doc, NormalizationStats* stats = nullptr) const;

 private:
  NormalizationConfig config_;
  std::unordered_map<char32_t, std::u32string> map_;
  std::unordered_set<char32_t> strip_;
};

}  // namespace corpusforge

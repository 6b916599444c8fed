// Reference implementations shared by the unit tests and the acceptance gate.
// They are written for clarity, never for speed, and share no code with the
// library beyond its public types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "corpusforge/masking.h"
#include "corpusforge/tokenizer.h"

namespace corpusforge::testing {

// Random strings mixing Persian, Arabic variants, digits, ZWNJ and decorations.
class MixedScriptGenerator {
 public:
  explicit MixedScriptGenerator(std::uint32_t seed, bool with_ligatures = true)
      : rng_(seed), with_ligatures_(with_ligatures) {}

  std::u32string Next() {
    static const std::u32string kPool =
        U"ابپتثجچحخدذرزژ"
        U"سشصضطظعغفقکگلم"
        U"نوهیآ"
        U"يكأإةى"
        U"0123456789٠٣٩۰۴۹"
        U"‌‌‍ـًَِْٔ​‎‏"
        U"  \n\t!?.,،؛؟«»<>NUM"
        U"abcxyz\U0001F600";
    static const std::u32string kLigatures = U"ﻻﻵﮎﻟﯽﷲﺎ";
    std::uniform_int_distribution<int> len(0, 40);
    std::uniform_int_distribution<std::size_t> pick(0, kPool.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_lig(0, kLigatures.size() - 1);
    std::uniform_int_distribution<int> run(1, 6);
    std::uniform_real_distribution<double> u(0, 1);
    std::u32string s;
    const int n = len(rng_);
    for (int i = 0; i < n; ++i) {
      char32_t c = kPool[pick(rng_)];
      if (with_ligatures_ && u(rng_) < 0.03) c = kLigatures[pick_lig(rng_)];
      const int reps = u(rng_) < 0.15 ? run(rng_) : 1;
      s.append(static_cast<std::size_t>(reps), c);
    }
    return s;
  }

 private:
  std::mt19937 rng_;
  bool with_ligatures_;
};

// Every way to cut `word` into vocab pieces (first piece bare, the rest "##").
inline void AllSegmentations(const std::string& word, std::size_t pos,
                             const std::set<std::string>& vocab,
                             std::vector<std::string>& current,
                             std::vector<std::vector<std::string>>& out) {
  if (pos == word.size()) {
    out.push_back(current);
    return;
  }
  for (std::size_t len = 1; pos + len <= word.size(); ++len) {
    std::string piece = word.substr(pos, len);
    if (pos > 0) piece = "##" + piece;
    if (!vocab.contains(piece)) continue;
    current.push_back(piece);
    AllSegmentations(word, pos + len, vocab, current, out);
    current.pop_back();
  }
}

// Greedy longest-match equals the segmentation whose piece-length sequence
// is lexicographically largest, provided single characters are all in vocab.
inline std::vector<std::string> OracleSegmentation(const std::string& word,
                                                   const std::set<std::string>& vocab) {
  std::vector<std::vector<std::string>> all;
  std::vector<std::string> current;
  AllSegmentations(word, 0, vocab, current, all);
  if (all.empty()) return {"[UNK]"};
  auto lengths = [](const std::vector<std::string>& seg) {
    std::vector<std::size_t> out;
    for (const auto& p : seg) out.push_back(p.rfind("##", 0) == 0 ? p.size() - 2 : p.size());
    return out;
  };
  return *std::max_element(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    return lengths(a) < lengths(b);
  });
}

// Sort-based reference: quantile p at h = (n - 1) p is the mean of the order
// statistics at floor(h) and ceil(h).
inline double OracleQuantile(std::vector<std::uint64_t> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return (static_cast<double>(v[lo]) + static_cast<double>(v[hi])) / 2.0;
}

// Whole-word closure, label faithfulness, specials untouched and the length
// bound for one example cut from `original`. Returns "" when all hold.
inline std::string ExampleViolation(const PretrainingExample& ex, const EncodedSequence& original,
                                    std::size_t max_len) {
  if (ex.input_ids.size() != ex.labels.size() || ex.word_ids.size() != ex.labels.size()) {
    return "parallel arrays differ in length";
  }
  if (ex.input_ids.size() < 3 || ex.input_ids.size() > max_len) return "bad length";
  if (ex.input_ids.front() != kClsId || ex.input_ids.back() != kSepId) return "missing CLS/SEP";
  if (ex.labels.front() != kIgnoreLabel || ex.labels.back() != kIgnoreLabel) {
    return "special carries a label";
  }
  std::map<std::int32_t, std::pair<int, int>> per_word;  // labeled, total
  bool any = false;
  for (std::size_t i = 0; i < ex.labels.size(); ++i) {
    if (ex.labels[i] != kIgnoreLabel) {
      any = true;
      if (Vocab::IsSpecial(ex.labels[i]) || ex.word_ids[i] == kNoWord) {
        return "label on a special position";
      }
    }
    if (ex.word_ids[i] == kNoWord) continue;
    auto& [labeled, total] = per_word[ex.word_ids[i]];
    labeled += ex.labels[i] != kIgnoreLabel;
    ++total;
  }
  if (!any) return "no labels";
  for (const auto& [w, lt] : per_word) {
    if (lt.first != 0 && lt.first != lt.second) {
      return "word " + std::to_string(w) + " partially labeled";
    }
  }
  // Labels must equal the uncorrupted ids of the same window.
  const std::size_t inner = ex.input_ids.size() - 2;
  std::size_t offset = 0;
  bool found = false;
  for (; offset + inner <= original.size(); ++offset) {
    if (std::equal(original.word_ids.begin() + static_cast<std::ptrdiff_t>(offset),
                   original.word_ids.begin() + static_cast<std::ptrdiff_t>(offset + inner),
                   ex.word_ids.begin() + 1)) {
      found = true;
      break;
    }
  }
  if (!found) return "window not found in source";
  for (std::size_t k = 0; k < inner; ++k) {
    const TokenId orig = original.ids[offset + k];
    if (ex.labels[k + 1] != kIgnoreLabel ? ex.labels[k + 1] != orig
                                         : ex.input_ids[k + 1] != orig) {
      return "position " + std::to_string(k + 1) + " unfaithful";
    }
  }
  return "";
}

}  // namespace corpusforge::testing

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusforge/corpusio.h"

namespace corpusforge {

// Character n-gram language model with additive smoothing.
//
// Each document is padded with order-1 boundary symbols in front and one
// behind; the boundary counts as a member of the alphabet. For a context h
// and symbol c:
//   P(c | h) = (count(h c) + alpha) / (count(h) + alpha * |alphabet|)
class CharNgramModel {
 public:
  // Stands in for the document boundary; never produced by normalization.
  static constexpr char32_t kBoundary = 0xFFFF;

  CharNgramModel(int order, double alpha);

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  bool empty() const { return context_counts_.empty(); }

  void Add(std::u32string_view text);
  // Decodes UTF-8 and adds the document.
  void AddText(std::string_view text);
  void Merge(const CharNgramModel& other);

  double LogProb(std::u32string_view context, char32_t symbol) const;
  double Prob(std::u32string_view context, char32_t symbol) const;

  // Mean natural-log probability per character (end boundary excluded).
  double MeanLogProbPerChar(std::u32string_view text) const;

  nlohmann::json ToJson() const;
  static CharNgramModel FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static CharNgramModel Load(const std::filesystem::path& path);

  const std::set<char32_t>& alphabet() const { return alphabet_; }
  // Contexts observed during training, for invariant checks.
  std::vector<std::u32string> Contexts() const;

 private:
  int order_;
  double alpha_;
  std::set<char32_t> alphabet_;
  std::unordered_map<std::u32string, std::uint64_t> ngram_counts_;
  std::unordered_map<std::u32string, std::uint64_t> context_counts_;
};

// Throws ContractError on an empty corpus, order < 1 or alpha <= 0.
CharNgramModel TrainCharModel(std::span<const Document> docs, int order = 3, double alpha = 0.1);

struct NoiseScore {
  double lm_logprob_per_char = 0;
  double stopword_ratio = 0;
  double nonalphabet_ratio = 0;
  std::size_t chars = 0;

  bool operator==(const NoiseScore&) const = default;
};

using StopwordSet = std::unordered_set<std::string>;

// The bundled Persian function-word list.
const StopwordSet& DefaultStopwords();
StopwordSet ParseStopwords(std::string_view text);

// Throws ContractError on empty text.
NoiseScore Score(std::string_view text, const CharNgramModel& model, const StopwordSet& stopwords);

struct FilterThresholds {
  double min_lm = -std::numeric_limits<double>::infinity();
  double min_stopword = 0.0;
  double max_nonalphabet = 1.0;
  std::size_t min_chars = 32;

  void Validate() const;
  nlohmann::json ToJson() const;
  static FilterThresholds FromJson(const nlohmann::json& j);
};

// Defaults shipped in data/discriminator_thresholds.json.
FilterThresholds DefaultFilterThresholds();

// Rule names in evaluation order; a rejection carries the first failing one.
inline constexpr std::string_view kTooShort = "too_short";
inline constexpr std::string_view kLowLm = "low_lm";
inline constexpr std::string_view kLowStopword = "low_stopword";
inline constexpr std::string_view kHighNonalphabet = "high_nonalphabet";

// Empty string when the document passes every threshold.
std::string_view RejectReason(const NoiseScore& score, const FilterThresholds& thresholds);

struct FilterDecision {
  bool kept = false;
  std::string reason;
  NoiseScore score;
};

FilterDecision Classify(const Document& doc, const CharNgramModel& model,
                        const StopwordSet& stopwords, const FilterThresholds& thresholds);

struct FilterResult {
  std::vector<Document> kept;
  std::vector<Document> rejected;  // meta["reject_reason"] names the rule
};

FilterResult Filter(std::span<const Document> docs, const CharNgramModel& model,
                    const StopwordSet& stopwords, const FilterThresholds& thresholds,
                    unsigned threads = 1);

// Picks the min_lm maximizing routing accuracy on labelled examples, other
// thresholds held fixed. Candidates are midpoints between sorted scores; ties
// go to the smallest threshold.
struct Calibration {
  double min_lm = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
};
Calibration CalibrateMinLm(std::span<const Document> accept, std::span<const Document> reject,
                           const CharNgramModel& model, const StopwordSet& stopwords,
                           FilterThresholds base);

}  // namespace corpusforge

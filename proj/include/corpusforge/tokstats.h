#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusforge/tokenizer.h"

namespace corpusforge {

// Quantiles use the midpoint rule: with h = (n - 1) * p the quantile is
// (x[floor(h)] + x[ceil(h)]) / 2 over the sorted counts. For p = 0.5 this is
// the usual "mean of the two central values" median for even n.
struct TokenCountDistribution {
  std::vector<std::uint64_t> counts;  // per example, in dataset order
  std::size_t n = 0;
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double whisker_low = 0;   // smallest count >= q1 - 1.5 IQR, at most q1
  double whisker_high = 0;  // largest count <= q3 + 1.5 IQR, at least q3
  std::size_t outlier_count = 0;
};

// Streaming summary over a count histogram; memory is proportional to the
// number of distinct counts.
class TokenCountAccumulator {
 public:
  void Add(std::uint64_t count);
  std::size_t n() const { return n_; }
  // Throws ContractError when no counts were added.
  TokenCountDistribution Summarize() const;

 private:
  double OrderStatistic(std::size_t k) const;
  double Quantile(double p) const;

  std::map<std::uint64_t, std::size_t> histogram_;
  std::size_t n_ = 0;
};

TokenCountDistribution Summarize(std::span<const std::uint64_t> counts);

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  // One field per example, or two for pair datasets (CLS a SEP b SEP).
  std::vector<std::string> fields{"text"};

  // Parses "name=path[:field_a[,field_b]]".
  static DatasetSpec Parse(std::string_view spec);
};

struct VocabSpec {
  std::string name;
  std::filesystem::path path;

  // Parses "name=path".
  static VocabSpec Parse(std::string_view spec);
};

// Token count of one example including CLS/SEP.
std::uint64_t CountExample(const WordPieceTokenizer& tokenizer,
                           std::span<const std::string> segments);

// Streams a JSON Lines dataset. Throws ContractError when it is empty and
// DataError when a record lacks a requested field.
TokenCountDistribution CountDataset(const DatasetSpec& dataset, const WordPieceTokenizer& tokenizer);

struct ComparisonCell {
  std::string tokenizer;
  std::string dataset;
  std::optional<TokenCountDistribution> distribution;
  std::string error;
};

struct ComparisonTable {
  std::vector<std::string> tokenizers;
  std::vector<std::string> datasets;
  std::vector<ComparisonCell> cells;  // row-major: tokenizer, then dataset

  const ComparisonCell& At(std::size_t tokenizer, std::size_t dataset) const {
    return cells[tokenizer * datasets.size() + dataset];
  }

  // Medians, one row per tokenizer, one column per dataset; "NA" for failed cells.
  std::string ToCsv() const;
  // Boxplot records, one per cell.
  nlohmann::ordered_json ToJson() const;
};

// Load failures are recorded per cell; other cells still run.
ComparisonTable Compare(std::span<const VocabSpec> vocabs, std::span<const DatasetSpec> datasets,
                        unsigned threads = 1);

std::string FormatStat(double value);

}  // namespace corpusforge

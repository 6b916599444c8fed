#include "corpusforge/tokstats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "corpusforge/error.h"
#include "corpusforge/parallel.h"
#include "corpusforge/utf8.h"

namespace corpusforge {

void TokenCountAccumulator::Add(std::uint64_t count) {
  ++histogram_[count];
  ++n_;
}

double TokenCountAccumulator::OrderStatistic(std::size_t k) const {
  std::size_t seen = 0;
  for (const auto& [value, freq] : histogram_) {
    seen += freq;
    if (k < seen) return static_cast<double>(value);
  }
  return static_cast<double>(histogram_.rbegin()->first);
}

double TokenCountAccumulator::Quantile(double p) const {
  const double h = static_cast<double>(n_ - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return (OrderStatistic(lo) + OrderStatistic(hi)) / 2.0;
}

TokenCountDistribution TokenCountAccumulator::Summarize() const {
  if (n_ == 0) throw ContractError("cannot summarize an empty dataset");
  TokenCountDistribution d;
  d.n = n_;
  d.median = Quantile(0.5);
  d.q1 = Quantile(0.25);
  d.q3 = Quantile(0.75);
  const double iqr = d.q3 - d.q1;
  const double low_fence = d.q1 - 1.5 * iqr;
  const double high_fence = d.q3 + 1.5 * iqr;
  bool have_low = false;
  for (const auto& [value, freq] : histogram_) {
    const auto v = static_cast<double>(value);
    if (v < low_fence || v > high_fence) {
      d.outlier_count += freq;
      continue;
    }
    if (!have_low) {
      d.whisker_low = v;
      have_low = true;
    }
    d.whisker_high = v;
  }
  // With a zero IQR between two values no point may lie inside the fences.
  if (!have_low) {
    d.whisker_low = d.q1;
    d.whisker_high = d.q3;
  }
  d.whisker_low = std::min(d.whisker_low, d.q1);
  d.whisker_high = std::max(d.whisker_high, d.q3);
  return d;
}

TokenCountDistribution Summarize(std::span<const std::uint64_t> counts) {
  TokenCountAccumulator acc;
  for (auto c : counts) acc.Add(c);
  TokenCountDistribution d = acc.Summarize();
  d.counts.assign(counts.begin(), counts.end());
  return d;
}

DatasetSpec DatasetSpec::Parse(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ContractError("dataset must be given as name=path[:field_a[,field_b]], got '" +
                        std::string(spec) + "'");
  }
  DatasetSpec d;
  d.name = std::string(spec.substr(0, eq));
  std::string_view rest = spec.substr(eq + 1);
  const auto colon = rest.rfind(':');
  if (colon != std::string_view::npos && rest.substr(colon).find('/') == std::string_view::npos) {
    std::string_view fields = rest.substr(colon + 1);
    rest = rest.substr(0, colon);
    d.fields.clear();
    while (!fields.empty()) {
      const auto comma = fields.find(',');
      d.fields.emplace_back(fields.substr(0, comma));
      fields = comma == std::string_view::npos ? std::string_view{} : fields.substr(comma + 1);
    }
    if (d.fields.empty() || d.fields.size() > 2) {
      throw ContractError("dataset '" + d.name + "' must name one or two fields");
    }
  }
  d.path = std::string(rest);
  return d;
}

VocabSpec VocabSpec::Parse(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ContractError("vocab must be given as name=path, got '" + std::string(spec) + "'");
  }
  return {std::string(spec.substr(0, eq)), std::string(spec.substr(eq + 1))};
}

std::uint64_t CountExample(const WordPieceTokenizer& tokenizer,
                           std::span<const std::string> segments) {
  std::uint64_t total = 1;  // CLS
  for (const auto& s : segments) total += tokenizer.Encode(s, false).size() + 1;  // + SEP
  return total;
}

TokenCountDistribution CountDataset(const DatasetSpec& dataset, const WordPieceTokenizer& tokenizer) {
  std::ifstream in(dataset.path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + dataset.path.string());
  TokenCountAccumulator acc;
  std::vector<std::uint64_t> counts;
  std::vector<std::string> segments(dataset.fields.size());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw DataError(dataset.path.string() + " line " + std::to_string(line_number) +
                      ": invalid JSON record");
    }
    for (std::size_t f = 0; f < dataset.fields.size(); ++f) {
      auto it = record.find(dataset.fields[f]);
      if (it == record.end() || !it->is_string()) {
        throw DataError(dataset.path.string() + " line " + std::to_string(line_number) +
                        ": missing string field '" + dataset.fields[f] + "'");
      }
      segments[f] = it->get<std::string>();
    }
    const std::uint64_t c = CountExample(tokenizer, segments);
    acc.Add(c);
    counts.push_back(c);
  }
  if (acc.n() == 0) throw ContractError("dataset '" + dataset.name + "' is empty");
  TokenCountDistribution d = acc.Summarize();
  d.counts = std::move(counts);
  return d;
}

ComparisonTable Compare(std::span<const VocabSpec> vocabs, std::span<const DatasetSpec> datasets,
                        unsigned threads) {
  if (vocabs.empty() || datasets.empty()) {
    throw ContractError("compare needs at least one vocab and one dataset");
  }
  ComparisonTable table;
  for (const auto& v : vocabs) table.tokenizers.push_back(v.name);
  for (const auto& d : datasets) table.datasets.push_back(d.name);

  std::vector<std::optional<WordPieceTokenizer>> tokenizers(vocabs.size());
  std::vector<std::string> load_errors(vocabs.size());
  for (std::size_t v = 0; v < vocabs.size(); ++v) {
    try {
      tokenizers[v].emplace(Vocab::Load(vocabs[v].path));
    } catch (const std::exception& e) {
      load_errors[v] = e.what();
    }
  }
  table.cells = ParallelMap<ComparisonCell>(
      vocabs.size() * datasets.size(), threads, [&](std::size_t i) {
        const std::size_t v = i / datasets.size();
        const std::size_t d = i % datasets.size();
        ComparisonCell cell{vocabs[v].name, datasets[d].name, std::nullopt, load_errors[v]};
        if (!tokenizers[v]) return cell;
        try {
          cell.distribution = CountDataset(datasets[d], *tokenizers[v]);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        return cell;
      });
  return table;
}

std::string FormatStat(double value) {
  char buf[64];
  if (value == std::floor(value)) {
    std::snprintf(buf, sizeof buf, "%.0f", value);
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", value);
  }
  return buf;
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ComparisonTable::ToCsv() const {
  std::string out = "tokenizer";
  for (const auto& d : datasets) out += "," + CsvField(d);
  out += "\n";
  for (std::size_t t = 0; t < tokenizers.size(); ++t) {
    out += CsvField(tokenizers[t]);
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const auto& cell = At(t, d);
      out += ",";
      out += cell.distribution ? FormatStat(cell.distribution->median) : "NA";
    }
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json ComparisonTable::ToJson() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& cell : cells) {
    nlohmann::ordered_json j;
    j["tokenizer"] = cell.tokenizer;
    j["dataset"] = cell.dataset;
    if (cell.distribution) {
      const auto& d = *cell.distribution;
      j["n"] = d.n;
      j["median"] = d.median;
      j["q1"] = d.q1;
      j["q3"] = d.q3;
      j["whisker_low"] = d.whisker_low;
      j["whisker_high"] = d.whisker_high;
      j["outlier_count"] = d.outlier_count;
    } else {
      j["error"] = cell.error;
    }
    out.push_back(j);
  }
  return out;
}

}  // namespace corpusforge

#include "corpusforge/discriminator.h"

#include <algorithm>
#include <cmath>

#include "corpusforge/atomic_file.h"
#include "corpusforge/error.h"
#include "corpusforge/parallel.h"
#include "corpusforge/unicode.h"
#include "corpusforge/utf8.h"

namespace corpusforge {
namespace {

#include "bundled_data.inc"

std::u32string Prepare(std::string_view text) {
  std::u32string cps = utf8::Decode(text);
  std::replace(cps.begin(), cps.end(), CharNgramModel::kBoundary, char32_t{0xFFFD});
  return cps;
}

bool IsAlphabetic(char32_t cp) {
  return unicode::IsPersoArabicLetter(cp) || cp == unicode::kZwnj;
}

}  // namespace

CharNgramModel::CharNgramModel(int order, double alpha) : order_(order), alpha_(alpha) {
  if (order < 1) throw ContractError("n-gram order must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ContractError("smoothing alpha must be > 0");
}

void CharNgramModel::Add(std::u32string_view text) {
  if (text.empty()) return;
  std::u32string padded(static_cast<std::size_t>(order_ - 1), kBoundary);
  padded.append(text);
  padded.push_back(kBoundary);
  alphabet_.insert(kBoundary);
  for (char32_t cp : text) alphabet_.insert(cp);
  const auto ctx_len = static_cast<std::size_t>(order_ - 1);
  for (std::size_t i = ctx_len; i < padded.size(); ++i) {
    const std::u32string_view gram(padded.data() + i - ctx_len, ctx_len + 1);
    ++ngram_counts_[std::u32string(gram)];
    ++context_counts_[std::u32string(gram.substr(0, ctx_len))];
  }
}

void CharNgramModel::AddText(std::string_view text) { Add(Prepare(text)); }

void CharNgramModel::Merge(const CharNgramModel& other) {
  if (other.order_ != order_) throw ContractError("cannot merge models of different order");
  alphabet_.insert(other.alphabet_.begin(), other.alphabet_.end());
  for (const auto& [g, n] : other.ngram_counts_) ngram_counts_[g] += n;
  for (const auto& [c, n] : other.context_counts_) context_counts_[c] += n;
}

double CharNgramModel::Prob(std::u32string_view context, char32_t symbol) const {
  const auto ctx_len = static_cast<std::size_t>(order_ - 1);
  std::u32string key(context.substr(context.size() > ctx_len ? context.size() - ctx_len : 0));
  const auto ctx_it = context_counts_.find(key);
  const double ctx_count = ctx_it == context_counts_.end() ? 0.0 : static_cast<double>(ctx_it->second);
  key.push_back(symbol);
  const auto gram_it = ngram_counts_.find(key);
  const double gram_count = gram_it == ngram_counts_.end() ? 0.0 : static_cast<double>(gram_it->second);
  return (gram_count + alpha_) / (ctx_count + alpha_ * static_cast<double>(alphabet_.size()));
}

double CharNgramModel::LogProb(std::u32string_view context, char32_t symbol) const {
  return std::log(Prob(context, symbol));
}

double CharNgramModel::MeanLogProbPerChar(std::u32string_view text) const {
  if (text.empty()) throw ContractError("cannot score empty text");
  const auto ctx_len = static_cast<std::size_t>(order_ - 1);
  std::u32string padded(ctx_len, kBoundary);
  padded.append(text);
  double total = 0;
  for (std::size_t i = ctx_len; i < padded.size(); ++i) {
    total += LogProb(std::u32string_view(padded.data() + i - ctx_len, ctx_len), padded[i]);
  }
  return total / static_cast<double>(text.size());
}

std::vector<std::u32string> CharNgramModel::Contexts() const {
  std::vector<std::u32string> out;
  out.reserve(context_counts_.size());
  for (const auto& [c, n] : context_counts_) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json CharNgramModel::ToJson() const {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  counts.reserve(ngram_counts_.size());
  for (const auto& [g, n] : ngram_counts_) counts.emplace_back(utf8::Encode(g), n);
  std::sort(counts.begin(), counts.end());
  nlohmann::json j;
  j["format"] = "corpusforge-charlm";
  j["version"] = 1;
  j["order"] = order_;
  j["alpha"] = alpha_;
  j["alphabet"] = std::vector<std::uint32_t>(alphabet_.begin(), alphabet_.end());
  j["counts"] = counts;
  return j;
}

CharNgramModel CharNgramModel::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format") != "corpusforge-charlm" || j.at("version") != 1) {
      throw DataError("not a corpusforge character model (format/version mismatch)");
    }
    CharNgramModel model(j.at("order").get<int>(), j.at("alpha").get<double>());
    for (std::uint32_t cp : j.at("alphabet").get<std::vector<std::uint32_t>>()) {
      model.alphabet_.insert(static_cast<char32_t>(cp));
    }
    const auto ctx_len = static_cast<std::size_t>(model.order_ - 1);
    for (const auto& entry : j.at("counts")) {
      const std::u32string gram = utf8::Decode(entry.at(0).get<std::string>());
      if (gram.size() != ctx_len + 1) throw DataError("n-gram of the wrong order in model file");
      const auto n = entry.at(1).get<std::uint64_t>();
      model.ngram_counts_[gram] += n;
      model.context_counts_[gram.substr(0, ctx_len)] += n;
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed character model: ") + e.what());
  }
}

void CharNgramModel::Save(const std::filesystem::path& path) const {
  WriteFileAtomic(path, ToJson().dump() + "\n");
}

CharNgramModel CharNgramModel::Load(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded()) throw DataError("model file " + path.string() + " is not JSON");
  return FromJson(j);
}

CharNgramModel TrainCharModel(std::span<const Document> docs, int order, double alpha) {
  CharNgramModel model(order, alpha);
  for (const auto& doc : docs) model.AddText(doc.text);
  if (model.empty()) throw ContractError("cannot train a character model on an empty corpus");
  return model;
}

const StopwordSet& DefaultStopwords() {
  static const StopwordSet words = ParseStopwords(kBundledStopwords);
  return words;
}

StopwordSet ParseStopwords(std::string_view text) {
  StopwordSet words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    const auto first = line.find_first_not_of(" \t\r");
    line = first == std::string_view::npos ? std::string_view{} : line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    if (!line.empty() && line.front() != '#') words.emplace(line);
  }
  return words;
}

NoiseScore Score(std::string_view text, const CharNgramModel& model, const StopwordSet& stopwords) {
  const std::u32string cps = Prepare(text);
  if (cps.empty()) throw ContractError("cannot score an empty document");
  NoiseScore score;
  score.chars = cps.size();
  score.lm_logprob_per_char = model.MeanLogProbPerChar(cps);

  std::size_t visible = 0;
  std::size_t nonalphabet = 0;
  std::size_t words = 0;
  std::size_t function_words = 0;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (unicode::IsWhitespace(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !unicode::IsWhitespace(cps[j])) {
      ++visible;
      if (!IsAlphabetic(cps[j])) ++nonalphabet;
      ++j;
    }
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && unicode::IsPunctuation(cps[b])) ++b;
    while (e > b && unicode::IsPunctuation(cps[e - 1])) --e;
    if (e > b) {
      ++words;
      if (stopwords.contains(utf8::Encode(std::u32string_view(cps).substr(b, e - b)))) {
        ++function_words;
      }
    }
    i = j;
  }
  score.nonalphabet_ratio =
      visible == 0 ? 1.0 : static_cast<double>(nonalphabet) / static_cast<double>(visible);
  score.stopword_ratio =
      words == 0 ? 0.0 : static_cast<double>(function_words) / static_cast<double>(words);
  return score;
}

void FilterThresholds::Validate() const {
  if (std::isnan(min_lm) || (std::isinf(min_lm) && min_lm > 0)) {
    throw ContractError("min_lm must be a number or -inf");
  }
  if (!std::isfinite(min_stopword) || !std::isfinite(max_nonalphabet)) {
    throw ContractError("ratio thresholds must be finite");
  }
  if (min_stopword < 0 || min_stopword > 1 || max_nonalphabet < 0 || max_nonalphabet > 1) {
    throw ContractError("ratio thresholds must lie in [0, 1]");
  }
}

nlohmann::json FilterThresholds::ToJson() const {
  nlohmann::json j;
  j["min_lm"] = std::isinf(min_lm) ? nlohmann::json("-inf") : nlohmann::json(min_lm);
  j["min_stopword"] = min_stopword;
  j["max_nonalphabet"] = max_nonalphabet;
  j["min_chars"] = min_chars;
  return j;
}

FilterThresholds FilterThresholds::FromJson(const nlohmann::json& j) {
  FilterThresholds t;
  if (auto it = j.find("min_lm"); it != j.end()) {
    t.min_lm = it->is_string() && it->get<std::string>() == "-inf"
                   ? -std::numeric_limits<double>::infinity()
                   : it->get<double>();
  }
  t.min_stopword = j.value("min_stopword", t.min_stopword);
  t.max_nonalphabet = j.value("max_nonalphabet", t.max_nonalphabet);
  t.min_chars = j.value("min_chars", t.min_chars);
  t.Validate();
  return t;
}

FilterThresholds DefaultFilterThresholds() {
  static const FilterThresholds defaults =
      FilterThresholds::FromJson(nlohmann::json::parse(kBundledThresholds));
  return defaults;
}

std::string_view RejectReason(const NoiseScore& score, const FilterThresholds& t) {
  if (score.chars < t.min_chars) return kTooShort;
  if (score.lm_logprob_per_char < t.min_lm) return kLowLm;
  if (score.stopword_ratio < t.min_stopword) return kLowStopword;
  if (score.nonalphabet_ratio > t.max_nonalphabet) return kHighNonalphabet;
  return {};
}

FilterDecision Classify(const Document& doc, const CharNgramModel& model,
                        const StopwordSet& stopwords, const FilterThresholds& thresholds) {
  FilterDecision d;
  if (doc.text.empty()) {
    d.reason = kTooShort;
    return d;
  }
  d.score = Score(doc.text, model, stopwords);
  d.reason = std::string(RejectReason(d.score, thresholds));
  d.kept = d.reason.empty();
  return d;
}

FilterResult Filter(std::span<const Document> docs, const CharNgramModel& model,
                    const StopwordSet& stopwords, const FilterThresholds& thresholds,
                    unsigned threads) {
  thresholds.Validate();
  auto decisions = ParallelMap<FilterDecision>(docs.size(), threads, [&](std::size_t i) {
    return Classify(docs[i], model, stopwords, thresholds);
  });
  FilterResult result;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (decisions[i].kept) {
      result.kept.push_back(docs[i]);
    } else {
      Document rejected = docs[i];
      rejected.meta["reject_reason"] = decisions[i].reason;
      result.rejected.push_back(std::move(rejected));
    }
  }
  return result;
}

Calibration CalibrateMinLm(std::span<const Document> accept, std::span<const Document> reject,
                           const CharNgramModel& model, const StopwordSet& stopwords,
                           FilterThresholds base) {
  std::vector<double> values;
  for (auto docs : {accept, reject}) {
    for (const auto& d : docs) values.push_back(Score(d.text, model, stopwords).lm_logprob_per_char);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    candidates.push_back((values[i] + values[i + 1]) / 2);
  }
  if (!values.empty()) candidates.push_back(values.back() + 1.0);

  Calibration best;
  best.total = accept.size() + reject.size();
  bool have = false;
  for (double c : candidates) {
    base.min_lm = c;
    std::size_t correct = 0;
    for (const auto& d : accept) correct += Classify(d, model, stopwords, base).kept ? 1 : 0;
    for (const auto& d : reject) correct += Classify(d, model, stopwords, base).kept ? 0 : 1;
    if (!have || correct > best.correct) {
      best.min_lm = c;
      best.correct = correct;
      have = true;
    }
  }
  return best;
}

}  // namespace corpusforge

#include "corpusforge/cli.h"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>

#include "corpusforge/atomic_file.h"
#include "corpusforge/corpusio.h"
#include "corpusforge/discriminator.h"
#include "corpusforge/error.h"
#include "corpusforge/hashing.h"
#include "corpusforge/manifest.h"
#include "corpusforge/masking.h"
#include "corpusforge/normalizer.h"
#include "corpusforge/parallel.h"
#include "corpusforge/tokenizer.h"
#include "corpusforge/tokstats.h"

namespace corpusforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kChunkDocs = 4096;

struct GlobalOptions {
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string config;
};

struct Context {
  GlobalOptions global;
  std::ostream& out;
  std::ostream& err;

  void Info(const json& record) const { err << record.dump() << '\n'; }
};

// Reads the corpus in fixed-size chunks. Chunk boundaries depend only on the
// input, never on the thread count.
template <typename Fn>
void ForEachChunk(CorpusReader& reader, Fn&& fn) {
  std::vector<Document> chunk;
  for (;;) {
    chunk.clear();
    while (chunk.size() < kChunkDocs) {
      auto doc = reader.Next();
      if (!doc) break;
      chunk.push_back(std::move(*doc));
    }
    if (chunk.empty()) return;
    fn(chunk);
  }
}

double ParseFraction(const std::string& text) {
  double value = 0;
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(text);
      const std::string den_text = text.substr(slash + 1);
      const double den = std::stod(den_text, &used);
      if (used != den_text.size() || den == 0) throw std::invalid_argument(text);
      value = num / den;
    } else {
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw ContractError("cannot parse fraction '" + text + "'");
  }
  return value;
}

json StatsJson(const NormalizationStats& s) {
  return {{"chars_mapped", s.chars_mapped},
          {"chars_stripped", s.chars_stripped},
          {"numbers_replaced", s.numbers_replaced},
          {"repeats_collapsed", s.repeats_collapsed}};
}

// ---------------------------------------------------------------------------
// corpus split

struct SplitOptions {
  std::string fraction = "0.01";
  std::string input, out_train, out_val;
};

void RunSplit(const Context& ctx, const SplitOptions& o) {
  const double fraction = ParseFraction(o.fraction);
  AssignToValidation("", fraction, ctx.global.seed);
  CorpusReader reader(o.input);
  PipelineManifest manifest("split");
  manifest.AddInput(o.input);
  manifest.SetConfig({{"fraction", fraction}, {"fraction_text", o.fraction}, {"seed", ctx.global.seed}});
  CorpusWriter train(o.out_train);
  CorpusWriter val(o.out_val);
  const auto counts = SplitCorpus(
      reader, fraction, ctx.global.seed, [&](const Document& d) { train.Write(d); },
      [&](const Document& d) { val.Write(d); });
  train.Commit();
  val.Commit();
  manifest.WriteFor(o.out_train);
  manifest.WriteFor(o.out_val);
  ctx.Info({{"stage", "split"}, {"train", counts.train}, {"validation", counts.validation}});
}

// ---------------------------------------------------------------------------
// normalize

struct NormalizeOptions {
  bool dump_config = false;
  std::string input, output;
};

NormalizationConfig LoadNormalizationConfig(const std::string& path) {
  if (path.empty()) return NormalizationConfig::Default();
  return NormalizationConfig::Parse(ReadFile(path));
}

void RunNormalize(const Context& ctx, const NormalizeOptions& o) {
  const NormalizationConfig config = LoadNormalizationConfig(ctx.global.config);
  if (o.dump_config) {
    ctx.out << config.Dump();
    return;
  }
  if (o.input.empty() || o.output.empty()) {
    throw ContractError("normalize needs IN.jsonl and OUT.jsonl (or --dump-config)");
  }
  const Normalizer normalizer(config);
  CorpusReader reader(o.input);
  PipelineManifest manifest("normalize");
  manifest.AddInput(o.input);
  if (!ctx.global.config.empty()) manifest.AddInput(ctx.global.config);
  const std::string table = config.Dump();
  manifest.SetConfig({{"table_sha256", Sha256Hex(table)}, {"table", table}});

  CorpusWriter writer(o.output);
  NormalizationStats total;
  ForEachChunk(reader, [&](std::vector<Document>& chunk) {
    auto results = ParallelMap<std::pair<Document, NormalizationStats>>(
        chunk.size(), ctx.global.threads, [&](std::size_t i) {
          NormalizationStats stats;
          Document doc = normalizer.Normalize(chunk[i], &stats);
          return std::make_pair(std::move(doc), stats);
        });
    for (const auto& [doc, stats] : results) {
      writer.Write(doc);
      total += stats;
    }
  });
  const std::size_t n = writer.Commit();
  manifest.WriteFor(o.output);
  ctx.Info({{"stage", "normalize"}, {"documents", n}, {"stats", StatsJson(total)}});
}

// ---------------------------------------------------------------------------
// discriminator

struct DiscriminatorTrainOptions {
  int order = 3;
  double alpha = 0.1;
  std::string input, model;
};

void RunDiscriminatorTrain(const Context& ctx, const DiscriminatorTrainOptions& o) {
  CorpusReader reader(o.input);
  CharNgramModel model(o.order, o.alpha);
  std::size_t docs = 0;
  ForEachChunk(reader, [&](std::vector<Document>& chunk) {
    for (const auto& d : chunk) model.AddText(d.text);
    docs += chunk.size();
  });
  if (model.empty()) throw ContractError("cannot train a character model on an empty corpus");
  PipelineManifest manifest("train-discriminator");
  manifest.AddInput(o.input);
  manifest.SetConfig({{"order", o.order}, {"alpha", o.alpha}});
  model.Save(o.model);
  manifest.WriteFor(o.model);
  ctx.Info({{"stage", "train-discriminator"}, {"documents", docs},
            {"alphabet_size", model.alphabet_size()}});
}

struct DiscriminatorFilterOptions {
  std::string model, stopwords;
  std::optional<double> min_lm, min_stopword, max_nonalphabet;
  std::optional<std::size_t> min_chars;
  std::string input, keep, reject;
};

void RunDiscriminatorFilter(const Context& ctx, const DiscriminatorFilterOptions& o) {
  const CharNgramModel model = CharNgramModel::Load(o.model);
  const StopwordSet stopwords =
      o.stopwords.empty() ? DefaultStopwords() : ParseStopwords(ReadFile(o.stopwords));
  FilterThresholds t = ctx.global.config.empty()
                           ? DefaultFilterThresholds()
                           : FilterThresholds::FromJson(json::parse(ReadFile(ctx.global.config)));
  if (o.min_lm) t.min_lm = *o.min_lm;
  if (o.min_stopword) t.min_stopword = *o.min_stopword;
  if (o.max_nonalphabet) t.max_nonalphabet = *o.max_nonalphabet;
  if (o.min_chars) t.min_chars = *o.min_chars;
  t.Validate();

  CorpusReader reader(o.input);
  PipelineManifest manifest("filter");
  manifest.AddInput(o.input);
  manifest.AddInput(o.model);
  if (!o.stopwords.empty()) manifest.AddInput(o.stopwords);
  manifest.SetConfig({{"thresholds", t.ToJson()}});

  CorpusWriter keep(o.keep);
  CorpusWriter reject(o.reject);
  std::map<std::string, std::size_t> reasons;
  ForEachChunk(reader, [&](std::vector<Document>& chunk) {
    auto decisions = ParallelMap<FilterDecision>(chunk.size(), ctx.global.threads, [&](std::size_t i) {
      return Classify(chunk[i], model, stopwords, t);
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (decisions[i].kept) {
        keep.Write(chunk[i]);
      } else {
        chunk[i].meta["reject_reason"] = decisions[i].reason;
        reject.Write(chunk[i]);
        ++reasons[decisions[i].reason];
      }
    }
  });
  const std::size_t kept = keep.Commit();
  const std::size_t rejected = reject.Commit();
  manifest.WriteFor(o.keep);
  manifest.WriteFor(o.reject);
  ctx.Info({{"stage", "filter"}, {"kept", kept}, {"rejected", rejected}, {"reasons", reasons}});
}

// ---------------------------------------------------------------------------
// tokenizer

struct TokenizerTrainOptions {
  std::size_t vocab_size = 50000;
  std::uint64_t min_freq = 2;
  std::size_t max_word_chars = 100;
  bool zwnj_split = false;
  std::string input, vocab;
};

void RunTokenizerTrain(const Context& ctx, const TokenizerTrainOptions& o) {
  WordPieceTrainerOptions options;
  options.vocab_size = o.vocab_size;
  options.min_frequency = o.min_freq;
  options.max_word_chars = o.max_word_chars;
  options.pretokenizer.zwnj_is_split = o.zwnj_split;
  options.threads = ctx.global.threads;

  CorpusReader reader(o.input);
  PipelineManifest manifest("train-tokenizer");
  manifest.AddInput(o.input);
  manifest.SetConfig({{"vocab_size", o.vocab_size},
                      {"min_frequency", o.min_freq},
                      {"max_word_chars", o.max_word_chars},
                      {"zwnj_is_split", o.zwnj_split}});
  WordCounts words;
  ForEachChunk(reader, [&](std::vector<Document>& chunk) { words.Merge(CountWords(chunk, options)); });
  const Vocab vocab = TrainWordPiece(words, options);
  vocab.Save(o.vocab);
  manifest.WriteFor(o.vocab);
  ctx.Info({{"stage", "train-tokenizer"}, {"distinct_words", words.counts().size()},
            {"vocab_size", vocab.size()}});
}

struct TokenizerEncodeOptions {
  std::string vocab;
  std::string field = "text";
  bool no_specials = false;
  bool zwnj_split = false;
  std::string input = "-";
  std::string output = "-";
};

void RunTokenizerEncode(const Context& ctx, const TokenizerEncodeOptions& o) {
  const WordPieceTokenizer tokenizer(Vocab::Load(o.vocab), 100, o.zwnj_split);
  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (o.input != "-") {
    file_in.open(o.input, std::ios::binary);
    if (!file_in) throw IoError("cannot open " + o.input);
    in = &file_in;
  }
  std::optional<AtomicOutputFile> file_out;
  std::ostream* out = &ctx.out;
  if (o.output != "-") {
    file_out.emplace(o.output);
    out = &file_out->stream();
  }

  std::string line;
  std::size_t line_number = 0;
  std::size_t records = 0;
  while (std::getline(*in, line)) {
    ++line_number;
    const json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw DataError("line " + std::to_string(line_number) + ": invalid JSON record");
    }
    auto text = record.find(o.field);
    if (text == record.end() || !text->is_string()) {
      throw DataError("line " + std::to_string(line_number) + ": missing field '" + o.field + "'");
    }
    const EncodedSequence seq = tokenizer.Encode(text->get<std::string>(), !o.no_specials);
    nlohmann::ordered_json j;
    if (auto id = record.find("id"); id != record.end()) j["id"] = *id;
    j["ids"] = seq.ids;
    j["word_ids"] = seq.word_ids;
    *out << j.dump() << '\n';
    ++records;
  }
  if (file_out) {
    file_out->Commit();
    PipelineManifest manifest("encode");
    if (o.input != "-") manifest.AddInput(o.input);
    manifest.AddInput(o.vocab);
    manifest.SetConfig({{"field", o.field}, {"add_specials", !o.no_specials}, {"zwnj_is_split", o.zwnj_split}});
    manifest.WriteFor(o.output);
  }
  ctx.Info({{"stage", "encode"}, {"records", records}});
}

// ---------------------------------------------------------------------------
// mask

struct MaskOptions {
  std::string vocab;
  std::optional<double> rate, mask_prob, random_prob, keep_prob;
  std::optional<std::size_t> min_len, max_len;
  std::uint64_t epoch = 0;
  std::string input, output;
};

void RunMaskBuild(const Context& ctx, const MaskOptions& o) {
  MaskingConfig config = ctx.global.config.empty()
                             ? MaskingConfig{}
                             : MaskingConfig::FromJson(json::parse(ReadFile(ctx.global.config)));
  config.epoch_seed = ctx.global.seed;
  if (o.rate) config.rate = *o.rate;
  if (o.mask_prob) config.mask_prob = *o.mask_prob;
  if (o.random_prob) config.random_prob = *o.random_prob;
  if (o.keep_prob) config.keep_prob = *o.keep_prob;
  if (o.min_len) config.min_len = *o.min_len;
  if (o.max_len) config.max_len = *o.max_len;
  config.Validate();

  const WordPieceTokenizer tokenizer(Vocab::Load(o.vocab));
  CorpusReader reader(o.input);
  PipelineManifest manifest("mask");
  manifest.AddInput(o.input);
  manifest.AddInput(o.vocab);
  manifest.SetConfig(config.ToJson());

  AtomicOutputFile out(o.output);
  const EpochStats stats = WriteEpoch(reader, tokenizer, config, o.epoch, ctx.global.threads, out.stream());
  out.Commit();
  const json batch = BatchManifest(tokenizer.vocab(), config, o.epoch, stats);
  for (const auto& [key, value] : batch.items()) {
    if (key != "config") manifest.Set(key, value);
  }
  manifest.WriteFor(o.output);
  const double fraction = stats.maskable_tokens == 0
                              ? 0.0
                              : static_cast<double>(stats.labeled_tokens) /
                                    static_cast<double>(stats.maskable_tokens);
  ctx.Info({{"stage", "mask"}, {"epoch", o.epoch}, {"examples", stats.examples},
            {"skipped_empty", stats.skipped_empty}, {"skipped_unmaskable", stats.skipped_unmaskable},
            {"masked_fraction", fraction}});
}

// ---------------------------------------------------------------------------
// tokstats

struct TokstatsOptions {
  std::vector<std::string> vocabs, datasets;
  std::string out_csv, out_json;
};

void RunTokstatsCompare(const Context& ctx, const TokstatsOptions& o) {
  std::vector<VocabSpec> vocabs;
  std::vector<DatasetSpec> datasets;
  for (const auto& v : o.vocabs) vocabs.push_back(VocabSpec::Parse(v));
  for (const auto& d : o.datasets) datasets.push_back(DatasetSpec::Parse(d));
  const ComparisonTable table = Compare(vocabs, datasets, ctx.global.threads);

  PipelineManifest manifest("tokstats");
  for (const auto& v : vocabs) {
    if (fs::exists(v.path)) manifest.AddInput(v.path);
  }
  for (const auto& d : datasets) {
    if (fs::exists(d.path)) manifest.AddInput(d.path);
  }
  manifest.SetConfig({{"vocabs", o.vocabs}, {"datasets", o.datasets}});
  const std::string csv = table.ToCsv();
  if (!o.out_csv.empty()) {
    WriteFileAtomic(o.out_csv, csv);
    manifest.WriteFor(o.out_csv);
  } else {
    ctx.out << csv;
  }
  if (!o.out_json.empty()) {
    WriteFileAtomic(o.out_json, table.ToJson().dump(2) + "\n");
    manifest.WriteFor(o.out_json);
  }
  std::size_t failed = 0;
  for (const auto& cell : table.cells) {
    if (!cell.distribution) {
      ++failed;
      ctx.Info({{"stage", "tokstats"}, {"tokenizer", cell.tokenizer}, {"dataset", cell.dataset},
                {"error", cell.error}});
    }
  }
  ctx.Info({{"stage", "tokstats"}, {"cells", table.cells.size()}, {"failed_cells", failed}});
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"corpusforge: Persian MLM pretraining data pipeline", "corpusforge"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(ToolVersion()));

  GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker threads (output is identical for any value)")
      ->envname("CORPUSFORGE_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", global.seed, "Seed for splitting and masking")->envname("CORPUSFORGE_SEED");
  app.add_option("--config", global.config, "Stage configuration file")->envname("CORPUSFORGE_CONFIG");

  std::function<void(const Context&)> action;

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Corpus utilities");
  corpus->require_subcommand(1);
  SplitOptions split;
  auto* split_cmd = corpus->add_subcommand("split", "Deterministic id-keyed train/validation split");
  split_cmd->add_option("--fraction", split.fraction, "Validation fraction, decimal or p/q");
  split_cmd->add_option("IN", split.input)->required();
  split_cmd->add_option("OUT_TRAIN", split.out_train)->required();
  split_cmd->add_option("OUT_VAL", split.out_val)->required();
  split_cmd->callback([&] { action = [&](const Context& c) { RunSplit(c, split); }; });

  // normalize
  NormalizeOptions normalize;
  auto* normalize_cmd = app.add_subcommand("normalize", "Canonicalize Perso-Arabic text");
  normalize_cmd->add_flag("--dump-config", normalize.dump_config, "Print the effective table and exit");
  normalize_cmd->add_option("IN", normalize.input);
  normalize_cmd->add_option("OUT", normalize.output);
  normalize_cmd->callback([&] { action = [&](const Context& c) { RunNormalize(c, normalize); }; });

  // discriminator
  auto* disc = app.add_subcommand("discriminator", "Noise and language filter");
  disc->require_subcommand(1);
  DiscriminatorTrainOptions dtrain;
  auto* dtrain_cmd = disc->add_subcommand("train", "Train the character n-gram model");
  dtrain_cmd->add_option("--order", dtrain.order, "n-gram order")->check(CLI::PositiveNumber);
  dtrain_cmd->add_option("--alpha", dtrain.alpha, "Additive smoothing");
  dtrain_cmd->add_option("IN", dtrain.input)->required();
  dtrain_cmd->add_option("MODEL", dtrain.model)->required();
  dtrain_cmd->callback([&] { action = [&](const Context& c) { RunDiscriminatorTrain(c, dtrain); }; });

  DiscriminatorFilterOptions dfilter;
  auto* dfilter_cmd = disc->add_subcommand("filter", "Route documents to KEEP or REJECT");
  dfilter_cmd->add_option("--model", dfilter.model)->required();
  dfilter_cmd->add_option("--stopwords", dfilter.stopwords, "Function-word list, one per line");
  dfilter_cmd->add_option("--min-lm", dfilter.min_lm);
  dfilter_cmd->add_option("--min-stopword", dfilter.min_stopword);
  dfilter_cmd->add_option("--max-nonalphabet", dfilter.max_nonalphabet);
  dfilter_cmd->add_option("--min-chars", dfilter.min_chars);
  dfilter_cmd->add_option("IN", dfilter.input)->required();
  dfilter_cmd->add_option("KEEP", dfilter.keep)->required();
  dfilter_cmd->add_option("REJECT", dfilter.reject)->required();
  dfilter_cmd->callback([&] { action = [&](const Context& c) { RunDiscriminatorFilter(c, dfilter); }; });

  // tokenizer
  auto* tok = app.add_subcommand("tokenizer", "WordPiece training and encoding");
  tok->require_subcommand(1);
  TokenizerTrainOptions ttrain;
  auto* ttrain_cmd = tok->add_subcommand("train", "Train a WordPiece vocabulary");
  ttrain_cmd->add_option("--vocab-size", ttrain.vocab_size);
  ttrain_cmd->add_option("--min-freq", ttrain.min_freq);
  ttrain_cmd->add_option("--max-word-chars", ttrain.max_word_chars);
  ttrain_cmd->add_flag("--zwnj-split", ttrain.zwnj_split, "Treat ZWNJ as a word boundary");
  ttrain_cmd->add_option("IN", ttrain.input)->required();
  ttrain_cmd->add_option("VOCAB", ttrain.vocab)->required();
  ttrain_cmd->callback([&] { action = [&](const Context& c) { RunTokenizerTrain(c, ttrain); }; });

  TokenizerEncodeOptions tencode;
  auto* tencode_cmd = tok->add_subcommand("encode", "Encode JSON Lines records");
  tencode_cmd->add_option("--vocab", tencode.vocab)->required();
  tencode_cmd->add_option("--field", tencode.field, "Text field to encode");
  tencode_cmd->add_flag("--no-specials", tencode.no_specials, "Omit CLS/SEP");
  tencode_cmd->add_flag("--zwnj-split", tencode.zwnj_split, "Treat ZWNJ as a word boundary");
  tencode_cmd->add_option("IN", tencode.input, "Input path or - for stdin");
  tencode_cmd->add_option("OUT", tencode.output, "Output path or - for stdout");
  tencode_cmd->callback([&] { action = [&](const Context& c) { RunTokenizerEncode(c, tencode); }; });

  // mask
  auto* mask = app.add_subcommand("mask", "Masked-LM example generation");
  mask->require_subcommand(1);
  MaskOptions mbuild;
  auto* mbuild_cmd = mask->add_subcommand("build", "Write one epoch of whole-word masked examples");
  mbuild_cmd->add_option("--vocab", mbuild.vocab)->required();
  mbuild_cmd->add_option("--rate", mbuild.rate);
  mbuild_cmd->add_option("--mask-prob", mbuild.mask_prob);
  mbuild_cmd->add_option("--random-prob", mbuild.random_prob);
  mbuild_cmd->add_option("--keep-prob", mbuild.keep_prob);
  mbuild_cmd->add_option("--min-len", mbuild.min_len);
  mbuild_cmd->add_option("--max-len", mbuild.max_len);
  mbuild_cmd->add_option("--epoch", mbuild.epoch);
  mbuild_cmd->add_option("IN", mbuild.input)->required();
  mbuild_cmd->add_option("OUT", mbuild.output)->required();
  mbuild_cmd->callback([&] { action = [&](const Context& c) { RunMaskBuild(c, mbuild); }; });

  // tokstats
  auto* stats = app.add_subcommand("tokstats", "Tokenizer efficiency analysis");
  stats->require_subcommand(1);
  TokstatsOptions compare;
  auto* compare_cmd = stats->add_subcommand("compare", "Median token counts per tokenizer and dataset");
  compare_cmd->add_option("--vocab", compare.vocabs, "name=path")->required();
  compare_cmd->add_option("--dataset", compare.datasets, "name=path[:field_a[,field_b]]")->required();
  compare_cmd->add_option("--out-csv", compare.out_csv);
  compare_cmd->add_option("--out-json", compare.out_json);
  compare_cmd->callback([&] { action = [&](const Context& c) { RunTokstatsCompare(c, compare); }; });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const Context ctx{global, out, err};
  try {
    action(ctx);
    return 0;
  } catch (const Error& e) {
    ctx.Info({{"error", e.what()}});
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    ctx.Info({{"error", e.what()}});
    return static_cast<int>(ErrorKind::kIo);
  } catch (const nlohmann::json::exception& e) {
    ctx.Info({{"error", e.what()}});
    return static_cast<int>(ErrorKind::kData);
  } catch (const std::exception& e) {
    ctx.Info({{"error", e.what()}});
    return static_cast<int>(ErrorKind::kContract);
  }
}

}  // namespace corpusforge

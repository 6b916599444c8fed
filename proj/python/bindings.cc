#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "corpusforge/corpusio.h"
#include "corpusforge/discriminator.h"
#include "corpusforge/error.h"
#include "corpusforge/masking.h"
#include "corpusforge/normalizer.h"
#include "corpusforge/tokenizer.h"
#include "corpusforge/tokstats.h"

namespace py = pybind11;
using namespace pybind11::literals;

namespace corpusforge {
namespace {

py::dict StatsDict(const NormalizationStats& s) {
  return py::dict("chars_mapped"_a = s.chars_mapped, "chars_stripped"_a = s.chars_stripped,
                  "numbers_replaced"_a = s.numbers_replaced,
                  "repeats_collapsed"_a = s.repeats_collapsed);
}

py::dict DistributionDict(const TokenCountDistribution& d) {
  return py::dict("n"_a = d.n, "median"_a = d.median, "q1"_a = d.q1, "q3"_a = d.q3,
                  "whisker_low"_a = d.whisker_low, "whisker_high"_a = d.whisker_high,
                  "outlier_count"_a = d.outlier_count, "counts"_a = d.counts);
}

py::dict ScoreDict(const NoiseScore& s) {
  return py::dict("lm_logprob_per_char"_a = s.lm_logprob_per_char,
                  "stopword_ratio"_a = s.stopword_ratio,
                  "nonalphabet_ratio"_a = s.nonalphabet_ratio, "chars"_a = s.chars);
}

py::tuple EncodedTuple(const EncodedSequence& e) { return py::make_tuple(e.ids, e.word_ids); }

}  // namespace
}  // namespace corpusforge

PYBIND11_MODULE(_core, m) {
  using namespace corpusforge;
  m.doc() = "Persian pretraining corpus preparation: normalization, filtering, WordPiece, masking.";

  // Error kinds surface as distinct Python exceptions.
  static py::exception<Error> base_error(m, "CorpusforgeError", PyExc_RuntimeError);
  static py::exception<Error> contract_error(m, "ContractError", base_error.ptr());
  static py::exception<Error> io_error(m, "CorpusIoError", base_error.ptr());
  static py::exception<Error> data_error(m, "DataError", base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::kContract: py::set_error(contract_error, e.what()); break;
        case ErrorKind::kIo: py::set_error(io_error, e.what()); break;
        case ErrorKind::kData: py::set_error(data_error, e.what()); break;
      }
    }
  });

  // Corpus I/O.
  py::class_<Document>(m, "Document")
      .def(py::init<std::string, std::string, std::map<std::string, std::string>>(), "id"_a,
           "text"_a, "meta"_a = std::map<std::string, std::string>{})
      .def_readwrite("id", &Document::id)
      .def_readwrite("text", &Document::text)
      .def_readwrite("meta", &Document::meta)
      .def(py::self == py::self)
      .def("__repr__", [](const Document& d) { return "Document(" + FormatRecord(d) + ")"; });
  m.def("read_corpus", &ReadCorpus, "path"_a);
  m.def("write_corpus", &WriteCorpus, "docs"_a, "path"_a);
  m.def("format_record", &FormatRecord, "doc"_a);
  m.def("parse_record", [](std::string_view line) { return ParseRecord(line, 1, 0); }, "line"_a);
  m.def("assign_to_validation", &AssignToValidation, "id"_a, "fraction"_a, "seed"_a);
  m.def(
      "split_corpus",
      [](const std::vector<Document>& docs, double fraction, std::uint64_t seed) {
        auto s = SplitCorpus(docs, fraction, seed);
        return py::make_tuple(std::move(s.train), std::move(s.validation));
      },
      "docs"_a, "fraction"_a, "seed"_a);

  // Normalization.
  py::class_<NormalizationConfig>(m, "NormalizationConfig")
      .def_static("default", &NormalizationConfig::Default)
      .def_static("parse", &NormalizationConfig::Parse, "text"_a)
      .def("dump", &NormalizationConfig::Dump)
      .def_readwrite("number_token", &NormalizationConfig::number_token)
      .def_readwrite("repeat_threshold", &NormalizationConfig::repeat_threshold)
      .def_readwrite("repeat_keep", &NormalizationConfig::repeat_keep);
  py::class_<Normalizer>(m, "Normalizer")
      .def(py::init<NormalizationConfig>(), "config"_a = NormalizationConfig::Default())
      .def("normalize", [](const Normalizer& n, std::string_view text) {
        return n.Normalize(text).text;
      }, "text"_a)
      .def("normalize_with_stats", [](const Normalizer& n, std::string_view text) {
        auto r = n.Normalize(text);
        return py::make_tuple(r.text, StatsDict(r.stats));
      }, "text"_a)
      .def("normalize_document", [](const Normalizer& n, const Document& d) {
        return n.Normalize(d);
      }, "doc"_a);

  // Tokenizer.
  py::class_<Vocab>(m, "Vocab")
      .def(py::init<std::vector<std::string>>(), "tokens"_a)
      .def_static("load", &Vocab::Load, "path"_a)
      .def_static("special_tokens", &Vocab::SpecialTokens)
      .def("save", &Vocab::Save, "path"_a)
      .def("serialize", &Vocab::Serialize)
      .def("digest", &Vocab::Digest)
      .def("token", &Vocab::Token, "id"_a)
      .def("find", &Vocab::Find, "token"_a)
      .def("__contains__", &Vocab::Contains)
      .def("__len__", &Vocab::size)
      .def_property_readonly("tokens", &Vocab::tokens);
  m.def(
      "pretokenize",
      [](std::string_view text, bool zwnj_is_split) {
        PreTokenizerOptions options;
        options.zwnj_is_split = zwnj_is_split;
        std::vector<std::string> out;
        for (auto& p : PreTokenize(text, options)) out.push_back(std::move(p.text));
        return out;
      },
      "text"_a, "zwnj_is_split"_a = false);
  m.def(
      "train_wordpiece",
      [](const std::vector<Document>& docs, std::size_t vocab_size, std::uint64_t min_frequency,
         std::size_t max_word_chars, bool zwnj_is_split, unsigned threads) {
        WordPieceTrainerOptions options;
        options.vocab_size = vocab_size;
        options.min_frequency = min_frequency;
        options.max_word_chars = max_word_chars;
        options.pretokenizer.zwnj_is_split = zwnj_is_split;
        options.threads = threads;
        return TrainWordPiece(std::span(docs), options);
      },
      "docs"_a, "vocab_size"_a, "min_frequency"_a = 2, "max_word_chars"_a = 100,
      "zwnj_is_split"_a = false, "threads"_a = 1, py::call_guard<py::gil_scoped_release>());
  py::class_<WordPieceTokenizer>(m, "WordPieceTokenizer")
      .def(py::init<Vocab, std::size_t, bool>(), "vocab"_a, "max_word_chars"_a = 100,
           "zwnj_is_split"_a = false)
      .def_property_readonly("vocab", &WordPieceTokenizer::vocab)
      .def("encode", [](const WordPieceTokenizer& t, std::string_view text, bool add_specials) {
        return EncodedTuple(t.Encode(text, add_specials));
      }, "text"_a, "add_specials"_a = false)
      .def("encode_word", &WordPieceTokenizer::EncodeWord, "word"_a)
      .def("decode", [](const WordPieceTokenizer& t, const std::vector<TokenId>& ids) {
        return t.Decode(ids);
      }, "ids"_a);

  // Masking.
  m.attr("IGNORE_LABEL") = kIgnoreLabel;
  py::class_<MaskingConfig>(m, "MaskingConfig")
      .def(py::init<>())
      .def_readwrite("rate", &MaskingConfig::rate)
      .def_readwrite("mask_prob", &MaskingConfig::mask_prob)
      .def_readwrite("random_prob", &MaskingConfig::random_prob)
      .def_readwrite("keep_prob", &MaskingConfig::keep_prob)
      .def_readwrite("max_len", &MaskingConfig::max_len)
      .def_readwrite("min_len", &MaskingConfig::min_len)
      .def_readwrite("epoch_seed", &MaskingConfig::epoch_seed)
      .def("validate", &MaskingConfig::Validate)
      .def("to_json", [](const MaskingConfig& c) { return c.ToJson().dump(); });
  py::class_<PretrainingExample>(m, "PretrainingExample")
      .def_readonly("input_ids", &PretrainingExample::input_ids)
      .def_readonly("labels", &PretrainingExample::labels)
      .def_readonly("word_ids", &PretrainingExample::word_ids)
      .def(py::self == py::self)
      .def("to_json_line", &FormatExample);
  m.def("parse_example", &ParseExample, "line"_a);
  m.def(
      "build_example",
      [](const Document& doc, const WordPieceTokenizer& tok, const MaskingConfig& config,
         std::uint64_t epoch) -> std::optional<PretrainingExample> {
        auto r = BuildExample(doc, tok, config, epoch);
        if (r.status != ExampleStatus::kOk) return std::nullopt;
        return std::move(r.example);
      },
      "doc"_a, "tokenizer"_a, "config"_a, "epoch"_a);
  m.def(
      "build_epoch",
      [](const std::vector<Document>& docs, const WordPieceTokenizer& tok,
         const MaskingConfig& config, std::uint64_t epoch, unsigned threads) {
        return BuildEpoch(std::span(docs), tok, config, epoch, threads);
      },
      "docs"_a, "tokenizer"_a, "config"_a, "epoch"_a, "threads"_a = 1,
      py::call_guard<py::gil_scoped_release>());

  // Token-count statistics.
  m.def("summarize", [](const std::vector<std::uint64_t>& counts) {
    return DistributionDict(Summarize(counts));
  }, "counts"_a);
  m.def("count_example", [](const WordPieceTokenizer& tok, const std::vector<std::string>& segs) {
    return CountExample(tok, segs);
  }, "tokenizer"_a, "segments"_a);
  m.def("count_dataset", [](const std::string& spec, const WordPieceTokenizer& tok) {
    return DistributionDict(CountDataset(DatasetSpec::Parse(spec), tok));
  }, "spec"_a, "tokenizer"_a);

  // Noise discriminator.
  py::class_<CharNgramModel>(m, "CharNgramModel")
      .def_static("load", &CharNgramModel::Load, "path"_a)
      .def("save", &CharNgramModel::Save, "path"_a)
      .def_property_readonly("order", &CharNgramModel::order)
      .def_property_readonly("alpha", &CharNgramModel::alpha);
  m.def("train_char_model", [](const std::vector<Document>& docs, int order, double alpha) {
    return TrainCharModel(std::span(docs), order, alpha);
  }, "docs"_a, "order"_a = 3, "alpha"_a = 0.1);
  py::class_<FilterThresholds>(m, "FilterThresholds")
      .def(py::init<>())
      .def_static("default", &DefaultFilterThresholds)
      .def_readwrite("min_lm", &FilterThresholds::min_lm)
      .def_readwrite("min_stopword", &FilterThresholds::min_stopword)
      .def_readwrite("max_nonalphabet", &FilterThresholds::max_nonalphabet)
      .def_readwrite("min_chars", &FilterThresholds::min_chars);
  m.def("score", [](std::string_view text, const CharNgramModel& model) {
    return ScoreDict(Score(text, model, DefaultStopwords()));
  }, "text"_a, "model"_a);
  m.def("classify", [](const Document& doc, const CharNgramModel& model,
                       const FilterThresholds& t) {
    const auto d = Classify(doc, model, DefaultStopwords(), t);
    return py::make_tuple(d.kept, d.reason, ScoreDict(d.score));
  }, "doc"_a, "model"_a, "thresholds"_a = DefaultFilterThresholds());
  m.def("filter", [](const std::vector<Document>& docs, const CharNgramModel& model,
                     const FilterThresholds& t, unsigned threads) {
    auto r = Filter(std::span(docs), model, DefaultStopwords(), t, threads);
    return py::make_tuple(std::move(r.kept), std::move(r.rejected));
  }, "docs"_a, "model"_a, "thresholds"_a = DefaultFilterThresholds(), "threads"_a = 1);

#ifdef CORPUSFORGE_VERSION
  m.attr("__version__") = CORPUSFORGE_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}

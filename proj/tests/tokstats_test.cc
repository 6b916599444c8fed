#include "corpusforge/tokstats.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "corpusforge/error.h"
#include "oracles.h"
#include "test_util.h"

namespace corpusforge {
namespace {

using testing::DataDir;
using testing::OracleQuantile;
using testing::TempDir;

void ExpectMatchesOracle(const TokenCountDistribution& d) {
  ASSERT_EQ(d.n, d.counts.size());
  EXPECT_EQ(d.median, OracleQuantile(d.counts, 0.5));
  EXPECT_EQ(d.q1, OracleQuantile(d.counts, 0.25));
  EXPECT_EQ(d.q3, OracleQuantile(d.counts, 0.75));
  EXPECT_LE(d.q1, d.median);
  EXPECT_LE(d.median, d.q3);
  const double iqr = d.q3 - d.q1;
  std::vector<std::uint64_t> inside;
  std::size_t outliers = 0;
  for (auto c : d.counts) {
    const double x = static_cast<double>(c);
    if (x < d.q1 - 1.5 * iqr || x > d.q3 + 1.5 * iqr) {
      ++outliers;
    } else {
      inside.push_back(c);
    }
  }
  // Whiskers reach the extreme data inside the fences but never retreat
  // past the box, which matters when a zero IQR leaves nothing inside.
  double lo = d.q1, hi = d.q3;
  if (!inside.empty()) {
    lo = std::min(lo, static_cast<double>(*std::min_element(inside.begin(), inside.end())));
    hi = std::max(hi, static_cast<double>(*std::max_element(inside.begin(), inside.end())));
  }
  EXPECT_EQ(d.whisker_low, lo);
  EXPECT_EQ(d.whisker_high, hi);
  EXPECT_EQ(d.outlier_count, outliers);
}

TEST(SummarizeTest, Singleton) {
  const std::vector<std::uint64_t> v{7};
  const auto d = Summarize(v);
  EXPECT_EQ(d.n, 1u);
  EXPECT_EQ(d.median, 7);
  EXPECT_EQ(d.q1, 7);
  EXPECT_EQ(d.q3, 7);
}

TEST(SummarizeTest, EvenCountHalfIntegerMedian) {
  const std::vector<std::uint64_t> v{1, 2, 3, 4};
  const auto d = Summarize(v);
  EXPECT_EQ(d.median, 2.5);
  ExpectMatchesOracle(d);
}

TEST(SummarizeTest, EmptyIsError) {
  EXPECT_THROW(Summarize(std::span<const std::uint64_t>{}), Error);
}

TEST(SummarizeTest, RandomListsMatchOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> len(1, 300);
    std::uniform_int_distribution<std::uint64_t> val(0, trial % 2 ? 20 : 5000);
    std::vector<std::uint64_t> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = val(rng);
    ExpectMatchesOracle(Summarize(v));
  }
}

TEST(SummarizeTest, PermutationInvariant) {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = 0; i < 101; ++i) v.push_back((i * 37) % 53 + (i % 7 == 0 ? 400 : 0));
  const auto ref = Summarize(v);
  std::mt19937 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    const auto d = Summarize(v);
    EXPECT_EQ(d.median, ref.median);
    EXPECT_EQ(d.q1, ref.q1);
    EXPECT_EQ(d.q3, ref.q3);
    EXPECT_EQ(d.whisker_low, ref.whisker_low);
    EXPECT_EQ(d.whisker_high, ref.whisker_high);
    EXPECT_EQ(d.outlier_count, ref.outlier_count);
  }
}

TEST(SpecTest, ParsesDatasetAndVocabSpecs) {
  const auto a = DatasetSpec::Parse("sent=data/sent.jsonl");
  EXPECT_EQ(a.name, "sent");
  EXPECT_EQ(a.path, "data/sent.jsonl");
  EXPECT_EQ(a.fields, std::vector<std::string>{"text"});
  const auto b = DatasetSpec::Parse("nli=/x/nli.jsonl:premise,hypothesis");
  EXPECT_EQ(b.path, "/x/nli.jsonl");
  EXPECT_EQ(b.fields, (std::vector<std::string>{"premise", "hypothesis"}));
  const auto c = DatasetSpec::Parse("q=qa.jsonl:question");
  EXPECT_EQ(c.fields, std::vector<std::string>{"question"});
  EXPECT_THROW(DatasetSpec::Parse("nopath"), Error);
  EXPECT_THROW(DatasetSpec::Parse("x=p:a,b,c"), Error);
  const auto v = VocabSpec::Parse("base=v.txt");
  EXPECT_EQ(v.name, "base");
  EXPECT_EQ(v.path, "v.txt");
}

Vocab ToyVocab() {
  std::vector<std::string> t = Vocab::SpecialTokens();
  for (const char* s : {"a", "b", "##a", "##b", "ab", "##ab"}) t.emplace_back(s);
  return Vocab(t);
}

TEST(CountTest, IncludesClsAndOneSepPerSegment) {
  const WordPieceTokenizer tok(ToyVocab());
  const std::vector<std::string> one{"abab b"};
  EXPECT_EQ(CountExample(tok, one), 1u + 3u + 1u);
  const std::vector<std::string> two{"abab", "a"};
  EXPECT_EQ(CountExample(tok, two), 1u + 2u + 1u + 1u + 1u);
}

const Vocab& FixtureVocab(std::size_t size) {
  static std::map<std::size_t, Vocab> cache;
  auto it = cache.find(size);
  if (it == cache.end()) {
    WordPieceTrainerOptions options;
    options.vocab_size = size;
    it = cache.emplace(size, TrainWordPiece(std::span(testing::NormalizedFixtureCorpus()), options))
             .first;
  }
  return it->second;
}

std::vector<DatasetSpec> FixtureDatasets() {
  const auto dir = DataDir() / "tokstats";
  return {
      DatasetSpec::Parse("sentiment=" + (dir / "sentiment.jsonl").string()),
      DatasetSpec::Parse("nli=" + (dir / "nli.jsonl").string() + ":premise,hypothesis"),
      DatasetSpec::Parse("qa=" + (dir / "qa.jsonl").string() + ":question,context"),
      DatasetSpec::Parse("news=" + (dir / "news.jsonl").string()),
      DatasetSpec::Parse("short=" + (dir / "short.jsonl").string()),
  };
}

TEST(CountDatasetTest, StreamingSummaryMatchesOracleOnFixtures) {
  const WordPieceTokenizer tok(FixtureVocab(1000));
  bool saw_half = false;
  for (const auto& ds : FixtureDatasets()) {
    const auto d = CountDataset(ds, tok);
    SCOPED_TRACE(ds.name);
    ExpectMatchesOracle(d);
    if (d.n % 2 == 0 && d.median != std::floor(d.median)) saw_half = true;
  }
  EXPECT_TRUE(saw_half) << "no fixture exercises a half-integer median";
}

TEST(CountDatasetTest, SentimentFixtureHas200Examples) {
  const WordPieceTokenizer tok(FixtureVocab(1000));
  EXPECT_EQ(CountDataset(FixtureDatasets()[0], tok).n, 200u);
}

TEST(CountDatasetTest, EmptyDatasetAndMissingFieldAreErrors) {
  TempDir dir;
  testing::Spit(dir / "empty.jsonl", "");
  testing::Spit(dir / "nofield.jsonl", "{\"premise\":\"a\"}\n");
  const WordPieceTokenizer tok(ToyVocab());
  EXPECT_THROW(CountDataset(DatasetSpec::Parse("e=" + (dir / "empty.jsonl").string()), tok),
               Error);
  EXPECT_THROW(CountDataset(DatasetSpec::Parse("n=" + (dir / "nofield.jsonl").string() +
                                               ":premise,hypothesis"),
                            tok),
               Error);
}

TEST(CompareTest, ShapeOfCsvAndJson) {
  TempDir dir;
  FixtureVocab(1000).Save(dir / "a.txt");
  FixtureVocab(3000).Save(dir / "b.txt");
  const std::vector<VocabSpec> vocabs{VocabSpec::Parse("small=" + (dir / "a.txt").string()),
                                      VocabSpec::Parse("large=" + (dir / "b.txt").string())};
  const auto all = FixtureDatasets();
  const std::vector<DatasetSpec> datasets{all[0], all[1]};
  const auto table = Compare(vocabs, datasets, 2);
  ASSERT_EQ(table.cells.size(), 4u);
  const std::string csv = table.ToCsv();
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tokenizer,sentiment,nli");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 6), "small,");
  const auto json = table.ToJson();
  ASSERT_EQ(json.size(), 4u);
  for (const auto& rec : json) {
    for (const char* key : {"tokenizer", "dataset", "n", "median", "q1", "q3", "whisker_low",
                            "whisker_high", "outlier_count"}) {
      EXPECT_TRUE(rec.contains(key)) << key;
    }
  }
  EXPECT_EQ(table.At(1, 0).tokenizer, "large");
  EXPECT_EQ(table.At(1, 0).dataset, "sentiment");
}

TEST(CompareTest, FailuresStayInTheirCell) {
  TempDir dir;
  FixtureVocab(1000).Save(dir / "a.txt");
  const std::vector<VocabSpec> vocabs{VocabSpec::Parse("ok=" + (dir / "a.txt").string()),
                                      VocabSpec::Parse("gone=" + (dir / "missing.txt").string())};
  const std::vector<DatasetSpec> datasets{
      FixtureDatasets()[0], DatasetSpec::Parse("nope=" + (dir / "missing.jsonl").string())};
  const auto table = Compare(vocabs, datasets);
  EXPECT_TRUE(table.At(0, 0).distribution.has_value());
  EXPECT_FALSE(table.At(0, 1).distribution.has_value());
  EXPECT_FALSE(table.At(0, 1).error.empty());
  EXPECT_FALSE(table.At(1, 0).distribution.has_value());
  EXPECT_NE(table.ToCsv().find("NA"), std::string::npos);
  EXPECT_TRUE(table.ToJson()[1].contains("error"));
}

TEST(CompareTest, FormatStat) {
  EXPECT_EQ(FormatStat(28), "28");
  EXPECT_EQ(FormatStat(113.5), "113.5");
  EXPECT_EQ(FormatStat(2.5), "2.5");
}

TEST(CompareTest, ExtendedVocabMedianNeverHigher) {
  const WordPieceTokenizer base(FixtureVocab(1000));
  const WordPieceTokenizer extended(FixtureVocab(3000));
  for (const auto& ds : FixtureDatasets()) {
    EXPECT_LE(CountDataset(ds, extended).median, CountDataset(ds, base).median) << ds.name;
  }
}

}  // namespace
}  // namespace corpusforge

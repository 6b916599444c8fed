#include "corpusforge/cli.h"

#include <gtest/gtest.h>

#include "corpusforge/hashing.h"
#include "corpusforge/masking.h"
#include "corpusforge/normalizer.h"
#include "pipeline_util.h"

namespace corpusforge {
namespace {

using testing::Cli;
using testing::Lines;
using testing::Slurp;
using testing::Spit;
using testing::TempDir;

std::string Fixture() { return (testing::DataDir() / "fixture_corpus.jsonl").string(); }

TEST(CliTest, HelpExitsZero) {
  const auto r = Cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("normalize"), std::string::npos);
  for (std::vector<std::string> sub :
       {std::vector<std::string>{"normalize"}, {"corpus", "split"}, {"discriminator", "train"},
        {"discriminator", "filter"}, {"tokenizer", "train"}, {"tokenizer", "encode"},
        {"mask", "build"}, {"tokstats", "compare"}}) {
    sub.push_back("--help");
    EXPECT_EQ(Cli(sub).code, 0) << sub[0];
  }
}

TEST(CliTest, VersionExitsZero) {
  const auto r = Cli({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_FALSE(r.out.empty());
}

TEST(CliTest, UsageErrorsExitOne) {
  const auto unknown = Cli({"frobnicate"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(Cli({"normalize", "--bogus", "a", "b"}).code, 1);
  EXPECT_EQ(Cli({}).code, 1);
  EXPECT_EQ(Cli({"--threads", "0", "normalize", "a", "b"}).code, 1);
}

TEST(CliTest, MissingInputExitsTwoAndNamesPath) {
  TempDir dir;
  const auto r = Cli({"normalize", "missing.jsonl", (dir / "out.jsonl").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("missing.jsonl"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "out.jsonl"));
}

TEST(CliTest, MalformedInputExitsThreeWithoutPartialOutput) {
  TempDir dir;
  Spit(dir / "bad.jsonl", "{\"id\":\"1\",\"text\":\"ok\"}\n{\"id\":\"2\"}\n");
  const auto r = Cli({"normalize", (dir / "bad.jsonl").string(), (dir / "out.jsonl").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "out.jsonl"));
  EXPECT_FALSE(std::filesystem::exists(dir / "out.jsonl.manifest.json"));
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(entry.path().filename(), "bad.jsonl");
  }
}

TEST(CliTest, ContractViolationExitsOne) {
  TempDir dir;
  const auto r = Cli({"corpus", "split", "--fraction", "1.0", Fixture(),
                      (dir / "t.jsonl").string(), (dir / "v.jsonl").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(std::filesystem::exists(dir / "t.jsonl"));
}

TEST(CliTest, NormalizeWritesManifestAndStats) {
  TempDir dir;
  const auto r = Cli({"normalize", Fixture(), (dir / "norm.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto info = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
  EXPECT_EQ(info["stage"], "normalize");
  EXPECT_GT(info["stats"]["chars_mapped"].get<int>(), 0);
  EXPECT_GT(info["stats"]["numbers_replaced"].get<int>(), 0);
  const auto manifest = nlohmann::json::parse(Slurp(dir / "norm.jsonl.manifest.json"));
  EXPECT_EQ(manifest["stage"], "normalize");
  EXPECT_EQ(manifest["output"]["sha256"], Sha256File(dir / "norm.jsonl"));
  EXPECT_EQ(manifest["inputs"][0]["sha256"], Sha256File(Fixture()));
  EXPECT_EQ(NormalizationConfig::Parse(manifest["config"]["table"].get<std::string>()).Dump(),
            NormalizationConfig::Default().Dump());

  const Normalizer n;
  const auto raw = ReadCorpus(Fixture());
  const auto got = ReadCorpus(dir / "norm.jsonl");
  ASSERT_EQ(raw.size(), got.size());
  for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_EQ(got[i], n.Normalize(raw[i]));
}

TEST(CliTest, DumpConfigAndCustomConfig) {
  TempDir dir;
  const auto dump = Cli({"normalize", "--dump-config"});
  ASSERT_EQ(dump.code, 0);
  EXPECT_EQ(dump.out, NormalizationConfig::Default().Dump());
  Spit(dir / "table.txt", "0041 -> 0042\nnumber_token = @\n");
  Spit(dir / "in.jsonl", "{\"id\":\"1\",\"text\":\"A7\"}\n");
  const auto r = Cli({"--config", (dir / "table.txt").string(), "normalize",
                      (dir / "in.jsonl").string(), (dir / "out.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadCorpus(dir / "out.jsonl")[0].text, "B@");
}

TEST(CliTest, EncodeStreamsToStdout) {
  TempDir dir;
  Spit(dir / "vocab.txt", "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\na\n##b\n");
  Spit(dir / "in.jsonl", "{\"id\":\"x\",\"text\":\"ab a\"}\n{\"id\":\"y\",\"text\":\"\"}\n");
  const auto r = Cli({"tokenizer", "encode", "--vocab", (dir / "vocab.txt").string(),
                      (dir / "in.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "{\"id\":\"x\",\"ids\":[2,5,6,5,3],\"word_ids\":[-1,0,0,1,-1]}\n"
            "{\"id\":\"y\",\"ids\":[2,3],\"word_ids\":[-1,-1]}\n");
}

TEST(CliTest, TokstatsCompareWritesCsvAndJson) {
  TempDir dir;
  Spit(dir / "vocab.txt", "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\na\n##b\n");
  Spit(dir / "d.jsonl", "{\"text\":\"ab a\"}\n{\"text\":\"a\"}\n");
  const auto r = Cli({"tokstats", "compare", "--vocab", "v=" + (dir / "vocab.txt").string(),
                      "--dataset", "d=" + (dir / "d.jsonl").string(), "--out-csv",
                      (dir / "t.csv").string(), "--out-json", (dir / "box.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  // counts 5 and 3, median 4
  EXPECT_EQ(Slurp(dir / "t.csv"), "tokenizer,d\nv,4\n");
  const auto box = nlohmann::json::parse(Slurp(dir / "box.json"));
  EXPECT_EQ(box[0]["median"], 4.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "t.csv.manifest.json"));
}

TEST(CliTest, EnvironmentOverridesSeed) {
  TempDir dir;
  ::setenv("CORPUSFORGE_SEED", "5", 1);
  const auto a = Cli({"corpus", "split", "--fraction", "0.5", Fixture(), (dir / "a.jsonl").string(),
                      (dir / "av.jsonl").string()});
  ::unsetenv("CORPUSFORGE_SEED");
  const auto b = Cli({"--seed", "5", "corpus", "split", "--fraction", "0.5", Fixture(),
                      (dir / "b.jsonl").string(), (dir / "bv.jsonl").string()});
  const auto c = Cli({"corpus", "split", "--fraction", "0.5", Fixture(), (dir / "c.jsonl").string(),
                      (dir / "cv.jsonl").string()});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(Slurp(dir / "a.jsonl"), Slurp(dir / "b.jsonl"));
  EXPECT_NE(Slurp(dir / "a.jsonl"), Slurp(dir / "c.jsonl"));
}

TEST(CliPipelineTest, DeterministicAcrossRunsAndThreadCounts) {
  TempDir one, two, eight;
  const auto a = testing::RunFixturePipeline(one.path(), 1);
  const auto b = testing::RunFixturePipeline(two.path(), 1);
  const auto c = testing::RunFixturePipeline(eight.path(), 8);
  ASSERT_TRUE(a.failures.empty()) << a.failures.front();
  ASSERT_TRUE(c.failures.empty()) << c.failures.front();
  EXPECT_EQ(a.manifest.size(), 9u);
  EXPECT_EQ(a.manifest, b.manifest);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.manifest, c.manifest);
  EXPECT_NE(a.manifest.at("batch0.jsonl"), a.manifest.at("batch1.jsonl"));
  for (const char* f : {"norm.jsonl", "keep.jsonl", "vocab.txt", "batch0.jsonl"}) {
    EXPECT_EQ(Slurp(one / f), Slurp(eight / f)) << f;
  }

  // The batch sidecar carries what the trainer needs.
  const auto m = nlohmann::json::parse(Slurp(one / "batch0.jsonl.manifest.json"));
  EXPECT_EQ(m["format"], "corpusforge-mlm-batch");
  EXPECT_EQ(m["vocab_hash"], Vocab::Load(one / "vocab.txt").Digest());
  EXPECT_EQ(m["example_count"], Lines(one / "batch0.jsonl").size());
  EXPECT_EQ(m["ignore_label"], kIgnoreLabel);
  EXPECT_EQ(m["config"]["epoch_seed"], 17);
  for (const auto& line : Lines(one / "batch0.jsonl")) ASSERT_NO_THROW(ParseExample(line));

  // The filter removed something, and every reject says why.
  const auto rejects = ReadCorpus(one / "reject.jsonl");
  EXPECT_FALSE(rejects.empty());
  for (const auto& d : rejects) EXPECT_TRUE(d.meta.contains("reject_reason"));
}

}  // namespace
}  // namespace corpusforge

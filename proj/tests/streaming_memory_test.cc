// Peak heap use while streaming must not grow with corpus length.
#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <new>

#include "corpusforge/corpusio.h"
#include "corpusforge/normalizer.h"
#include "test_util.h"

namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};

void* Track(std::size_t n) {
  void* p = std::malloc(n + sizeof(std::max_align_t));
  if (!p) throw std::bad_alloc();
  *static_cast<std::size_t*>(p) = n;
  const std::size_t live = g_live.fetch_add(n) + n;
  std::size_t peak = g_peak.load();
  while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
  }
  return static_cast<char*>(p) + sizeof(std::max_align_t);
}

void Release(void* p) {
  if (!p) return;
  char* base = static_cast<char*>(p) - sizeof(std::max_align_t);
  g_live.fetch_sub(*reinterpret_cast<std::size_t*>(base));
  std::free(base);
}

}  // namespace

void* operator new(std::size_t n) { return Track(n); }
void* operator new[](std::size_t n) { return Track(n); }
void operator delete(void* p) noexcept { Release(p); }
void operator delete[](void* p) noexcept { Release(p); }
void operator delete(void* p, std::size_t) noexcept { Release(p); }
void operator delete[](void* p, std::size_t) noexcept { Release(p); }

namespace corpusforge {
namespace {

std::size_t PeakWhileStreaming(const std::filesystem::path& in, const std::filesystem::path& out) {
  const Normalizer normalizer;
  const std::size_t base = g_live.load();
  g_peak.store(base);
  {
    CorpusReader reader(in);
    CorpusWriter writer(out);
    while (auto doc = reader.Next()) writer.Write(normalizer.Normalize(*doc));
    writer.Commit();
  }
  return g_peak.load() - base;
}

void WriteSynthetic(const std::filesystem::path& path, std::size_t docs) {
  CorpusWriter writer(path);
  const std::string body = "كتاب‌هاي خوبي خريدم و قيمت ۱۲۵۰ تومان بود!!! ";
  for (std::size_t i = 0; i < docs; ++i) {
    std::string text;
    for (std::size_t k = 0; k < 1 + i % 7; ++k) text += body;
    writer.Write({"d" + std::to_string(i), text, {{"source", "s"}}});
  }
  writer.Commit();
}

TEST(StreamingMemoryTest, PeakIndependentOfCorpusLength) {
  testing::TempDir dir;
  WriteSynthetic(dir / "small.jsonl", 2000);
  WriteSynthetic(dir / "large.jsonl", 40000);
  const auto large_bytes = std::filesystem::file_size(dir / "large.jsonl");
  ASSERT_GT(large_bytes, 10u << 20);

  const std::size_t small_peak = PeakWhileStreaming(dir / "small.jsonl", dir / "small.out");
  const std::size_t large_peak = PeakWhileStreaming(dir / "large.jsonl", dir / "large.out");
  // A 1 MiB cap is under a tenth of the large corpus.
  constexpr std::size_t kCap = 1u << 20;
  EXPECT_LT(large_peak, kCap) << "peak " << large_peak << " bytes";
  EXPECT_LT(large_peak, small_peak + 64 * 1024) << small_peak << " vs " << large_peak;
  EXPECT_EQ(ReadCorpus(dir / "large.out").size(), 40000u);
}

}  // namespace
}  // namespace corpusforge

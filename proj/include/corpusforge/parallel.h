#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace corpusforge {

// Runs fn(begin, end, worker) over `threads` contiguous blocks of [0, n).
// Blocks are fixed by (n, threads) alone, so per-block results merged in
// block order are reproducible. The exception from the lowest block wins.
template <typename Fn>
void ParallelBlocks(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  const std::size_t blocks = std::min<std::size_t>(threads, std::max<std::size_t>(n, 1));
  if (blocks <= 1) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::exception_ptr> errors(blocks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t begin = n * b / blocks;
      const std::size_t end = n * (b + 1) / blocks;
      workers.emplace_back([&, b, begin, end] {
        try {
          fn(begin, end, static_cast<unsigned>(b));
        } catch (...) {
          errors[b] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// out[i] = fn(i) for i in [0, n), computed on `threads` workers.
template <typename T, typename Fn>
std::vector<T> ParallelMap(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<T> out(n);
  ParallelBlocks(n, threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
  });
  return out;
}

}  // namespace corpusforge

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace corpusforge {

// Incremental SHA-256 (libsodium) with lowercase-hex output.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(std::string_view bytes);
  std::string HexDigest();

 private:
  struct State;
  State* state_;
};

std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::filesystem::path& path);

// SipHash-2-4 of `message` keyed by two 64-bit words. Stable across
// platforms; used for id-keyed splits and per-document rng seeds.
std::uint64_t KeyedHash(std::uint64_t key0, std::uint64_t key1,
                        std::string_view message);

}  // namespace corpusforge

#include "corpusforge/hashing.h"

#include <sodium.h>

#include <array>
#include <fstream>

#include "corpusforge/error.h"

namespace corpusforge {
namespace {

void EnsureSodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

std::string Hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 0xF];
  }
  return out;
}

void StoreLe64(unsigned char* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

struct Sha256::State {
  crypto_hash_sha256_state st;
};

Sha256::Sha256() : state_(new State) {
  EnsureSodium();
  crypto_hash_sha256_init(&state_->st);
}

Sha256::~Sha256() { delete state_; }

void Sha256::Update(std::string_view bytes) {
  crypto_hash_sha256_update(
      &state_->st, reinterpret_cast<const unsigned char*>(bytes.data()),
      bytes.size());
}

std::string Sha256::HexDigest() {
  std::array<unsigned char, crypto_hash_sha256_BYTES> out{};
  crypto_hash_sha256_final(&state_->st, out.data());
  return Hex(out.data(), out.size());
}

std::string Sha256Hex(std::string_view bytes) {
  Sha256 h;
  h.Update(bytes);
  return h.HexDigest();
}

std::string Sha256File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.Update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.HexDigest();
}

std::uint64_t KeyedHash(std::uint64_t key0, std::uint64_t key1,
                        std::string_view message) {
  EnsureSodium();
  std::array<unsigned char, crypto_shorthash_siphash24_KEYBYTES> key{};
  StoreLe64(key.data(), key0);
  StoreLe64(key.data() + 8, key1);
  std::array<unsigned char, crypto_shorthash_siphash24_BYTES> out{};
  crypto_shorthash_siphash24(
      out.data(), reinterpret_cast<const unsigned char*>(message.data()),
      message.size(), key.data());
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | out[i];
  return v;
}

}  // namespace corpusforge

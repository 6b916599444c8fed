#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace corpusforge::utf8 {

// Byte offset of the first invalid sequence, or nullopt when `bytes` is
// well-formed UTF-8 (no overlongs, no surrogates, nothing above U+10FFFF).
std::optional<std::size_t> FindInvalid(std::string_view bytes);

inline bool IsValid(std::string_view bytes) {
  return !FindInvalid(bytes).has_value();
}

// Decodes valid UTF-8. Invalid sequences decode to U+FFFD, one per byte.
std::u32string Decode(std::string_view bytes);

void Append(std::string& out, char32_t cp);
std::string Encode(std::u32string_view cps);

// Decodes the code point starting at `pos` and advances `pos` past it.
char32_t Next(std::string_view bytes, std::size_t& pos);

// Replaces every invalid byte with U+FFFD.
std::string Sanitize(std::string_view bytes);

std::size_t CountCodePoints(std::string_view bytes);

}  // namespace corpusforge::utf8

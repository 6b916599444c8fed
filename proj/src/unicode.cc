#include "corpusforge/unicode.h"

#include <algorithm>
#include <array>
#include <iterator>
#include <vector>

namespace corpusforge::unicode {
namespace {
#include "unicode_tables.inc"
}  // namespace

bool IsWhitespace(char32_t cp) {
  if (cp >= 0x09 && cp <= 0x0D) return true;
  switch (cp) {
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool IsPunctuation(char32_t cp) {
  auto it = std::upper_bound(
      std::begin(kPunctuationRanges), std::end(kPunctuationRanges), cp,
      [](char32_t value, const CodePointRange& r) { return value < r.first; });
  if (it == std::begin(kPunctuationRanges)) return false;
  --it;
  return cp <= it->last;
}

bool IsDigit(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= 0x0660 && cp <= 0x0669) ||
         (cp >= 0x06F0 && cp <= 0x06F9);
}

bool IsPersoArabicLetter(char32_t cp) {
  return (cp >= 0x0620 && cp <= 0x064A) || (cp >= 0x066E && cp <= 0x06D3) ||
         cp == 0x06D5 || (cp >= 0x06FA && cp <= 0x06FF);
}

std::span<const std::pair<char32_t, const char32_t*>> PresentationForms() {
  static const std::vector<std::pair<char32_t, const char32_t*>> forms = [] {
    std::vector<std::pair<char32_t, const char32_t*>> v;
    v.reserve(std::size(kPresentationForms));
    for (const auto& f : kPresentationForms) v.emplace_back(f.source, f.image);
    return v;
  }();
  return forms;
}

}  // namespace corpusforge::unicode

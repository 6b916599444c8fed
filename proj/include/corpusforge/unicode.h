#pragma once

#include <span>
#include <utility>

namespace corpusforge::unicode {

inline constexpr char32_t kZwnj = 0x200C;
inline constexpr char32_t kZwj = 0x200D;

// Unicode White_Space property.
bool IsWhitespace(char32_t cp);

// General category P*, plus the ASCII symbols $+<=>^`|~.
bool IsPunctuation(char32_t cp);

// ASCII 0-9, Arabic-Indic U+0660-U+0669, Extended Arabic-Indic U+06F0-U+06F9.
bool IsDigit(char32_t cp);

// Letters of the Arabic block used by Persian and its neighbours.
bool IsPersoArabicLetter(char32_t cp);

// (source, image) pairs for the Arabic presentation forms that have a
// compatibility decomposition. Images are already in canonical form.
std::span<const std::pair<char32_t, const char32_t*>> PresentationForms();

}  // namespace corpusforge::unicode

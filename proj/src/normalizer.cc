#include "corpusforge/normalizer.h"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "corpusforge/error.h"
#include "corpusforge/unicode.h"
#include "corpusforge/utf8.h"

namespace corpusforge {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

char32_t ParseHex(std::string_view s, std::size_t line_number) {
  s = Trim(s);
  if (s.size() > 2 && (s.substr(0, 2) == "U+" || s.substr(0, 2) == "u+")) s.remove_prefix(2);
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, 16);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || value > 0x10FFFF) {
    throw ContractError("normalizer config line " + std::to_string(line_number) +
                        ": bad code point '" + std::string(s) + "'");
  }
  return static_cast<char32_t>(value);
}

int ParseInt(std::string_view s, std::size_t line_number) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ContractError("normalizer config line " + std::to_string(line_number) +
                        ": bad integer '" + std::string(s) + "'");
  }
  return value;
}

std::string HexCp(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(cp));
  return buf;
}

}  // namespace

NormalizationConfig NormalizationConfig::Default() {
  NormalizationConfig c;
  c.char_map[0x064A] = U"\u06CC";  // Arabic yeh -> Persian yeh
  c.char_map[0x0643] = U"\u06A9";  // Arabic kaf -> Persian kaf
  c.char_map[0x0623] = U"\u0627";  // alef with hamza above
  c.char_map[0x0625] = U"\u0627";  // alef with hamza below
  c.char_map[0x0629] = U"\u0647";  // teh marbuta
  c.char_map[unicode::kZwj] = U"";
  for (const auto& [source, image] : unicode::PresentationForms()) {
    c.char_map[source] = image;
  }
  c.strip_set = {0x0640, 0x200B, 0x200E, 0x200F};
  for (char32_t cp = 0x064B; cp <= 0x065F; ++cp) c.strip_set.insert(cp);
  return c;
}

NormalizationConfig NormalizationConfig::Parse(std::string_view text) {
  NormalizationConfig c;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    if (auto arrow = line.find("->"); arrow != std::string_view::npos) {
      const char32_t source = ParseHex(line.substr(0, arrow), line_number);
      std::u32string image;
      std::string_view rest = Trim(line.substr(arrow + 2));
      while (!rest.empty()) {
        auto comma = rest.find(',');
        image.push_back(ParseHex(rest.substr(0, comma), line_number));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
      c.char_map[source] = std::move(image);
    } else if (line.starts_with("strip ")) {
      c.strip_set.insert(ParseHex(line.substr(6), line_number));
    } else if (auto eq = line.find('='); eq != std::string_view::npos) {
      const std::string_view key = Trim(line.substr(0, eq));
      const std::string_view value = Trim(line.substr(eq + 1));
      if (key == "number_token") {
        c.number_token = std::string(value);
      } else if (key == "repeat_threshold") {
        c.repeat_threshold = ParseInt(value, line_number);
      } else if (key == "repeat_keep") {
        c.repeat_keep = ParseInt(value, line_number);
      } else {
        throw ContractError("normalizer config line " + std::to_string(line_number) +
                            ": unknown key '" + std::string(key) + "'");
      }
    } else {
      throw ContractError("normalizer config line " + std::to_string(line_number) +
                          ": cannot parse '" + std::string(line) + "'");
    }
  }
  c.Validate();
  return c;
}

std::string NormalizationConfig::Dump() const {
  std::ostringstream out;
  out << "# corpusforge normalization table\n";
  out << "number_token = " << number_token << "\n";
  out << "repeat_threshold = " << repeat_threshold << "\n";
  out << "repeat_keep = " << repeat_keep << "\n";
  for (char32_t cp : strip_set) out << "strip " << HexCp(cp) << "\n";
  for (const auto& [source, image] : char_map) {
    out << HexCp(source) << " ->";
    for (std::size_t i = 0; i < image.size(); ++i) {
      out << (i == 0 ? " " : ",") << HexCp(image[i]);
    }
    out << "\n";
  }
  return out.str();
}

void NormalizationConfig::Validate() const {
  if (repeat_keep < 1 || repeat_threshold < 1 || repeat_keep >= repeat_threshold) {
    throw ContractError("repeat_keep must satisfy 1 <= repeat_keep < repeat_threshold");
  }
  if (number_token.empty() || !utf8::IsValid(number_token)) {
    throw ContractError("number_token must be non-empty UTF-8");
  }
  const std::u32string token = utf8::Decode(number_token);
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char32_t cp = token[i];
    if (unicode::IsDigit(cp)) throw ContractError("number_token must not contain digits");
    if (char_map.contains(cp) || strip_set.contains(cp)) {
      throw ContractError("number_token must already be in normal form");
    }
    if (i + 1 >= static_cast<std::size_t>(repeat_threshold)) {
      bool run = true;
      for (int k = 1; k < repeat_threshold; ++k) run = run && token[i - k] == cp;
      if (run) throw ContractError("number_token contains a collapsible run");
    }
  }
  for (const auto& [source, image] : char_map) {
    if (strip_set.contains(source)) {
      throw ContractError("U+" + HexCp(source) + " is both mapped and stripped");
    }
    if (unicode::IsDigit(source)) {
      throw ContractError("digit U+" + HexCp(source) + " may not be mapped");
    }
    for (char32_t cp : image) {
      if (char_map.contains(cp) || strip_set.contains(cp)) {
        throw ContractError("mapping for U+" + HexCp(source) +
                            " is not idempotent: image contains U+" + HexCp(cp));
      }
      if (unicode::IsDigit(cp)) {
        throw ContractError("mapping for U+" + HexCp(source) + " produces a digit");
      }
    }
  }
}

Normalizer::Normalizer(NormalizationConfig config) : config_(std::move(config)) {
  config_.Validate();
  map_.reserve(config_.char_map.size());
  for (const auto& [source, image] : config_.char_map) map_.emplace(source, image);
  strip_.insert(config_.strip_set.begin(), config_.strip_set.end());
}

std::string Normalizer::MapCharacters(std::string_view text,
                                      NormalizationStats* stats) const {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::Next(text, pos);
    if (strip_.contains(cp)) {
      if (stats) ++stats->chars_stripped;
      continue;
    }
    if (auto it = map_.find(cp); it != map_.end()) {
      if (stats) ++stats->chars_mapped;
      for (char32_t c : it->second) utf8::Append(out, c);
      continue;
    }
    out.append(text.substr(start, pos - start));
  }
  return out;
}

std::string Normalizer::ReplaceNumbers(std::string_view text,
                                       NormalizationStats* stats) const {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  bool in_number = false;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = utf8::Next(text, pos);
    if (unicode::IsDigit(cp)) {
      if (!in_number) {
        out += config_.number_token;
        if (stats) ++stats->numbers_replaced;
        in_number = true;
      }
      continue;
    }
    in_number = false;
    out.append(text.substr(start, pos - start));
  }
  return out;
}

std::string Normalizer::CollapseRepeats(std::string_view text,
                                        NormalizationStats* stats) const {
  const std::u32string cps = utf8::Decode(text);
  std::string out;
  out.reserve(text.size());
  const auto threshold = static_cast<std::size_t>(config_.repeat_threshold);
  const auto keep = static_cast<std::size_t>(config_.repeat_keep);
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t j = i + 1;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    std::size_t run = j - i;
    if (run >= threshold) {
      run = keep;
      if (stats) ++stats->repeats_collapsed;
    }
    for (std::size_t k = 0; k < run; ++k) utf8::Append(out, cps[i]);
    i = j;
  }
  return out;
}

NormalizedText Normalizer::Normalize(std::string_view text) const {
  NormalizedText result;
  result.text = CollapseRepeats(
      ReplaceNumbers(MapCharacters(text, &result.stats), &result.stats),
      &result.stats);
  return result;
}

Document Normalizer::Normalize(const Document& doc, NormalizationStats* stats) const {
  NormalizedText normalized = Normalize(doc.text);
  if (stats) *stats += normalized.stats;
  return Document{doc.id, std::move(normalized.text), doc.meta};
}

}  // namespace corpusforge

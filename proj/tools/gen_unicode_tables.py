#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from the Python unicodedata database.

Emits:
  * kPresentationForms: Arabic presentation forms (U+FB50-U+FDFF, U+FE70-U+FEFF)
    mapped to their compatibility decomposition, with the base character map
    and strip set already applied so the resulting table is closed.
  * kPunctuationRanges: every code point of general category P*, plus the ASCII
    symbols, merged into inclusive ranges.

Usage: python3 tools/gen_unicode_tables.py > src/unicode_tables.inc
"""
import sys
import unicodedata

BASE_MAP = {
    0x064A: [0x06CC],
    0x0643: [0x06A9],
    0x0623: [0x0627],
    0x0625: [0x0627],
    0x0629: [0x0647],
    0x200D: [],
}
STRIP = {0x0640, 0x200B, 0x200E, 0x200F} | set(range(0x064B, 0x0660))
DIGITS = set(range(0x30, 0x3A)) | set(range(0x660, 0x66A)) | set(range(0x6F0, 0x6FA))


def rewrite(cps):
    out = []
    for cp in cps:
        if cp in STRIP:
            continue
        if cp in BASE_MAP:
            out.extend(BASE_MAP[cp])
        else:
            out.append(cp)
    return out


def presentation_forms():
    entries = []
    for lo, hi in ((0xFB50, 0xFDFF), (0xFE70, 0xFEFF)):
        for cp in range(lo, hi + 1):
            ch = chr(cp)
            if unicodedata.category(ch) == "Cn":
                continue
            decomposed = unicodedata.normalize("NFKC", ch)
            if decomposed == ch:
                continue
            image = rewrite([ord(c) for c in decomposed])
            assert not any(c in DIGITS for c in image), hex(cp)
            assert all(c not in BASE_MAP and c not in STRIP for c in image)
            entries.append((cp, image))
    return entries


def punctuation_ranges():
    cps = [cp for cp in range(0x110000) if unicodedata.category(chr(cp)).startswith("P")]
    cps += [ord(c) for c in "$+<=>^`|~"]
    cps = sorted(set(cps))
    ranges = []
    for cp in cps:
        if ranges and ranges[-1][1] + 1 == cp:
            ranges[-1][1] = cp
        else:
            ranges.append([cp, cp])
    return ranges


def main():
    w = sys.stdout.write
    w("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n\n"
      % unicodedata.unidata_version)
    w("struct PresentationForm {\n  char32_t source;\n  const char32_t* image;\n};\n\n")
    w("constexpr PresentationForm kPresentationForms[] = {\n")
    for cp, image in presentation_forms():
        lit = "".join("\\U%08X" % c for c in image)
        w('    {0x%04X, U"%s"},\n' % (cp, lit))
    w("};\n\n")
    w("struct CodePointRange {\n  char32_t first;\n  char32_t last;\n};\n\n")
    w("constexpr CodePointRange kPunctuationRanges[] = {\n")
    for lo, hi in punctuation_ranges():
        w("    {0x%04X, 0x%04X},\n" % (lo, hi))
    w("};\n")


if __name__ == "__main__":
    main()

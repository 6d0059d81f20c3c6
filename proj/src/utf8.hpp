#pragma once

// Minimal UTF-8 helpers shared by keyword normalization and tokenization.

#include <cstdint>
#include <string>
#include <string_view>

namespace biblionet::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes the code point starting at `pos` and advances `pos`. Invalid
/// sequences yield U+FFFD and consume one byte.
char32_t next(std::string_view s, std::size_t& pos);

void append(std::string& out, char32_t cp);

/// Simple lowercase mapping for ASCII, Latin-1, Latin Extended-A, Greek and
/// basic Cyrillic. Other code points are returned unchanged.
char32_t to_lower(char32_t cp);

/// ASCII transliteration of a lowercase Latin letter with diacritics, or an
/// empty view when none is known.
std::string_view fold(char32_t cp);

std::string to_lower(std::string_view s);

}  // namespace biblionet::utf8

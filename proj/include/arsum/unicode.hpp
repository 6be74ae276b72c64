#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace arsum::unicode {

/// Decodes UTF-8. Returns nullopt on malformed input (overlongs, surrogates,
/// truncated sequences, codepoints above U+10FFFF).
std::optional<std::u32string> decode(std::string_view utf8);

/// Decodes UTF-8, throwing SchemaError with `context` in the message.
std::u32string decode_or_throw(std::string_view utf8, std::string_view context);

bool is_valid_utf8(std::string_view utf8);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

/// Unicode White_Space property.
bool is_whitespace(char32_t cp);

/// General category Cc.
bool is_control(char32_t cp);

/// ZWSP, ZWNJ, ZWJ, word joiner, BOM and the directional marks.
bool is_zero_width(char32_t cp);

constexpr char32_t kTatweel = U'ـ';

/// Arabic harakat U+064B..U+065F and superscript alef U+0670.
bool is_arabic_diacritic(char32_t cp);

/// Punctuation and ASCII symbols, including the Arabic comma, semicolon,
/// question mark and full stop.
bool is_punctuation(char32_t cp);

/// Simple lowercase mapping restricted to Latin-script letters (Basic Latin,
/// Latin-1, Latin Extended-A, Latin Extended Additional, fullwidth Latin).
/// Every other codepoint maps to itself.
char32_t to_lower_latin(char32_t cp);

}  // namespace arsum::unicode

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "arsum/json.hpp"

namespace arsum {

/// Text normalization applied before metric tokenization. Transforms run in
/// a fixed order: tatweel, diacritics, alef, ta marbuta, Latin case,
/// punctuation. The all-false config is the identity.
struct NormalizationConfig {
  bool strip_diacritics = false;
  bool normalize_alef = false;
  bool normalize_ta_marbuta = false;
  bool strip_tatweel = false;
  bool fold_latin_case = false;
  bool strip_punctuation = false;

  /// Profile name recorded in reports. "custom" when loaded from flags.
  std::string profile = "raw";

  /// Tatweel, diacritics, Latin case and punctuation on; letter folding off.
  static NormalizationConfig paper_default();
  static NormalizationConfig raw();
  /// Every transform on.
  static NormalizationConfig aggressive();
  /// Resolves "paper-default", "raw" or "aggressive"; throws ConfigError.
  static NormalizationConfig named(std::string_view name);

  /// Compares the transform flags only, not the profile label.
  bool same_transforms(const NormalizationConfig& other) const;
  bool operator==(const NormalizationConfig&) const = default;
};

void to_json(Json& j, const NormalizationConfig& c);
void from_json(const Json& j, NormalizationConfig& c);

/// Whitespace-free, non-empty tokens in text order.
struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

/// A sentence and its half-open byte range [start, end) in the source text.
struct SentenceSpan {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const SentenceSpan&) const = default;
};

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

std::string normalize(std::string_view text, const NormalizationConfig& config);

/// Splits on Unicode whitespace, dropping empty tokens.
TokenSequence tokenize_words(std::string_view text);

/// All contiguous n-grams with multiplicities. Throws InvalidNError for n = 0.
NgramCounts ngrams(const TokenSequence& seq, std::size_t n);

/// Splits after '.', '?', '!', '؟' or '؛' when followed by whitespace or the
/// end of the text. Spans exclude surrounding whitespace and keep their
/// terminator.
std::vector<SentenceSpan> segment_sentences(std::string_view text);

/// Segments raw text, then normalizes and tokenizes each sentence. Sentences
/// that normalize to nothing are dropped.
std::vector<TokenSequence> tokenize_sentences(std::string_view text,
                                              const NormalizationConfig& config);

}  // namespace arsum

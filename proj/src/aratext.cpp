#include "arsum/aratext.hpp"

#include "arsum/error.hpp"
#include "arsum/unicode.hpp"

namespace arsum {

namespace uc = unicode;

NormalizationConfig NormalizationConfig::paper_default() {
  NormalizationConfig c;
  c.strip_tatweel = true;
  c.strip_diacritics = true;
  c.fold_latin_case = true;
  c.strip_punctuation = true;
  c.profile = "paper-default";
  return c;
}

NormalizationConfig NormalizationConfig::raw() { return NormalizationConfig{}; }

NormalizationConfig NormalizationConfig::aggressive() {
  NormalizationConfig c{true, true, true, true, true, true, "aggressive"};
  return c;
}

NormalizationConfig NormalizationConfig::named(std::string_view name) {
  if (name == "paper-default") return paper_default();
  if (name == "raw") return raw();
  if (name == "aggressive") return aggressive();
  throw ConfigError("unknown normalization profile '" + std::string(name) + "'");
}

bool NormalizationConfig::same_transforms(const NormalizationConfig& o) const {
  return strip_diacritics == o.strip_diacritics &&
         normalize_alef == o.normalize_alef &&
         normalize_ta_marbuta == o.normalize_ta_marbuta &&
         strip_tatweel == o.strip_tatweel &&
         fold_latin_case == o.fold_latin_case &&
         strip_punctuation == o.strip_punctuation;
}

void to_json(Json& j, const NormalizationConfig& c) {
  j = Json{{"profile", c.profile},
                     {"strip_tatweel", c.strip_tatweel},
                     {"strip_diacritics", c.strip_diacritics},
                     {"normalize_alef", c.normalize_alef},
                     {"normalize_ta_marbuta", c.normalize_ta_marbuta},
                     {"fold_latin_case", c.fold_latin_case},
                     {"strip_punctuation", c.strip_punctuation}};
}

void from_json(const Json& j, NormalizationConfig& c) {
  if (!j.is_object()) throw ConfigError("normalization config must be an object");
  NormalizationConfig out;
  out.profile = "custom";
  for (const auto& [key, value] : j.items()) {
    if (key == "profile") {
      out.profile = value.get<std::string>();
      continue;
    }
    if (!value.is_boolean()) {
      throw ConfigError("normalization flag '" + key + "' must be a boolean");
    }
    const bool flag = value.get<bool>();
    if (key == "strip_tatweel") out.strip_tatweel = flag;
    else if (key == "strip_diacritics") out.strip_diacritics = flag;
    else if (key == "normalize_alef") out.normalize_alef = flag;
    else if (key == "normalize_ta_marbuta") out.normalize_ta_marbuta = flag;
    else if (key == "fold_latin_case") out.fold_latin_case = flag;
    else if (key == "strip_punctuation") out.strip_punctuation = flag;
    else throw ConfigError("unknown normalization flag '" + key + "'");
  }
  c = std::move(out);
}

std::string normalize(std::string_view text, const NormalizationConfig& config) {
  const std::u32string in = uc::decode_or_throw(text, "normalize");
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    if (config.strip_tatweel && cp == uc::kTatweel) continue;
    if (config.strip_diacritics && uc::is_arabic_diacritic(cp)) continue;
    if (config.normalize_alef && (cp == U'أ' || cp == U'إ' || cp == U'آ')) {
      cp = U'ا';
    }
    if (config.normalize_ta_marbuta && cp == U'ة') cp = U'ه';
    if (config.fold_latin_case) cp = uc::to_lower_latin(cp);
    if (config.strip_punctuation && uc::is_punctuation(cp)) cp = U' ';
    out.push_back(cp);
  }
  if (!config.strip_punctuation) return uc::encode(out);

  // Punctuation becomes a word break; collapse the result so a second pass is
  // a no-op.
  std::u32string collapsed;
  collapsed.reserve(out.size());
  bool pending_space = false;
  for (char32_t cp : out) {
    if (uc::is_whitespace(cp)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(cp);
  }
  return uc::encode(collapsed);
}

TokenSequence tokenize_words(std::string_view text) {
  TokenSequence seq;
  const std::u32string in = uc::decode_or_throw(text, "tokenize_words");
  std::u32string current;
  for (char32_t cp : in) {
    if (uc::is_whitespace(cp)) {
      if (!current.empty()) {
        seq.tokens.push_back(uc::encode(current));
        current.clear();
      }
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) seq.tokens.push_back(uc::encode(current));
  return seq;
}

NgramCounts ngrams(const TokenSequence& seq, std::size_t n) {
  if (n == 0) throw InvalidNError("n-gram order must be at least 1");
  NgramCounts counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    Ngram gram(seq.tokens.begin() + static_cast<std::ptrdiff_t>(i),
               seq.tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[std::move(gram)];
  }
  return counts;
}

namespace {

bool is_terminator(char32_t cp) {
  return cp == U'.' || cp == U'?' || cp == U'!' || cp == U'؟' || cp == U'؛';
}

}  // namespace

std::vector<SentenceSpan> segment_sentences(std::string_view text) {
  const std::u32string cps = uc::decode_or_throw(text, "segment_sentences");

  // Byte offset of every codepoint, plus one past the end.
  std::vector<std::size_t> offsets;
  offsets.reserve(cps.size() + 1);
  std::size_t pos = 0;
  for (char32_t cp : cps) {
    offsets.push_back(pos);
    pos += cp < 0x80 ? 1 : cp < 0x800 ? 2 : cp < 0x10000 ? 3 : 4;
  }
  offsets.push_back(pos);

  std::vector<SentenceSpan> spans;
  auto emit = [&](std::size_t first, std::size_t last) {
    // [first, last) in codepoints; trim whitespace on both sides.
    while (first < last && uc::is_whitespace(cps[first])) ++first;
    while (last > first && uc::is_whitespace(cps[last - 1])) --last;
    if (first == last) return;
    SentenceSpan span;
    span.start = offsets[first];
    span.end = offsets[last];
    span.text = std::string(text.substr(span.start, span.end - span.start));
    spans.push_back(std::move(span));
  };

  std::size_t sentence_start = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!is_terminator(cps[i])) continue;
    const bool at_break = i + 1 == cps.size() || uc::is_whitespace(cps[i + 1]);
    if (!at_break) continue;
    emit(sentence_start, i + 1);
    sentence_start = i + 1;
  }
  emit(sentence_start, cps.size());
  return spans;
}

std::vector<TokenSequence> tokenize_sentences(std::string_view text,
                                              const NormalizationConfig& config) {
  std::vector<TokenSequence> out;
  for (const auto& span : segment_sentences(text)) {
    TokenSequence seq = tokenize_words(normalize(span.text, config));
    if (!seq.empty()) out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace arsum

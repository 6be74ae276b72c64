#include "arsum/baseline.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "arsum/error.hpp"

namespace arsum {

void ExtractiveConfig::validate() const {
  if (min_sentence_words == 0) throw ConfigError("min_sentence_words must be positive");
  if (word_budget < min_sentence_words) {
    throw ConfigError("word_budget must be at least min_sentence_words");
  }
}

std::vector<SentenceScore> score_sentences(std::string_view text, const ExtractiveConfig& config) {
  config.validate();
  const auto spans = segment_sentences(text);
  if (spans.empty()) throw NoSentencesError("text has no sentences");

  std::vector<TokenSequence> tokens;
  tokens.reserve(spans.size());
  std::map<std::string, std::size_t> freq;
  for (const auto& span : spans) {
    tokens.push_back(tokenize_words(normalize(span.text, config.normalization)));
    for (const auto& t : tokens.back().tokens) ++freq[t];
  }
  std::size_t max_freq = 0;
  for (const auto& [_, f] : freq) max_freq = std::max(max_freq, f);

  std::vector<SentenceScore> scores(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    scores[i].span = spans[i];
    const auto& toks = tokens[i].tokens;
    if (toks.empty() || toks.size() < config.min_sentence_words) continue;
    // Integer numerator so equal token multisets give bit-equal scores.
    std::size_t sum = 0;
    for (const auto& t : toks) sum += freq[t];
    scores[i].score = static_cast<double>(sum) / static_cast<double>(max_freq * toks.size());
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].score > scores[b].score;
  });
  for (std::size_t r = 0; r < order.size(); ++r) scores[order[r]].rank = r + 1;
  return scores;
}

namespace {

std::size_t word_count(std::string_view s) { return tokenize_words(s).size(); }

}  // namespace

std::string summarize_extractive(std::string_view text, const ExtractiveConfig& config) {
  const auto scores = score_sentences(text, config);
  std::vector<std::size_t> by_rank(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) by_rank[scores[i].rank - 1] = i;

  std::vector<bool> chosen(scores.size(), false);
  std::size_t used = 0;
  for (std::size_t r = 0; r < by_rank.size(); ++r) {
    const std::size_t i = by_rank[r];
    const std::size_t words = word_count(scores[i].span.text);
    if (r == 0 || used + words <= config.word_budget) {
      chosen[i] = true;
      used += words;
    }
  }

  std::string out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!chosen[i]) continue;
    if (!out.empty()) out.push_back(' ');
    out += scores[i].span.text;
  }
  return out;
}

CandidateSet summarize_corpus(const Corpus& corpus, const std::vector<std::string>& ids,
                              const ExtractiveConfig& config) {
  CandidateSet set{std::string(kBaselineModelName)};
  auto run = [&](const CorpusRecord& rec) {
    set.add(rec.id, summarize_extractive(rec.section_content, config));
  };
  if (ids.empty()) {
    for (const auto& rec : corpus.records()) run(rec);
    return set;
  }
  for (const auto& id : ids) {
    const CorpusRecord* rec = corpus.find(id);
    if (!rec) throw MissingRecordError("id '" + id + "' is not in the corpus");
    run(*rec);
  }
  return set;
}

}  // namespace arsum

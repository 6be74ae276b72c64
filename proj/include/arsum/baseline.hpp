#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "arsum/aratext.hpp"
#include "arsum/candidates.hpp"
#include "arsum/corpus.hpp"

namespace arsum {

inline constexpr std::string_view kBaselineModelName = "baseline-extractive";

struct ExtractiveConfig {
  std::size_t word_budget = 256;
  std::size_t min_sentence_words = 1;
  NormalizationConfig normalization = NormalizationConfig::paper_default();

  /// Throws ConfigError unless 0 < min_sentence_words <= word_budget.
  void validate() const;
};

struct SentenceScore {
  SentenceSpan span;
  double score = 0.0;
  std::size_t rank = 0;  // 1 = most important
};

/// Term-frequency sentence scoring. Frequencies are counted over the
/// normalized tokens of the whole text and scaled by the largest one; a
/// sentence scores the mean scaled frequency of its tokens, or 0 when it has
/// fewer than min_sentence_words tokens. Returned in document order; ties
/// rank the earlier sentence first. Throws NoSentencesError.
std::vector<SentenceScore> score_sentences(std::string_view text, const ExtractiveConfig& config);

/// Greedy selection in rank order under the word budget, skipping sentences
/// that would overflow it. The top-ranked sentence is always kept. Output is
/// in document order, joined by single spaces.
std::string summarize_extractive(std::string_view text, const ExtractiveConfig& config);

/// Summarizes the section content of each listed record (all records when
/// `ids` is empty) into a candidate set named "baseline-extractive".
CandidateSet summarize_corpus(const Corpus& corpus, const std::vector<std::string>& ids,
                              const ExtractiveConfig& config);

}  // namespace arsum

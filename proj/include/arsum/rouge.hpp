#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "arsum/aratext.hpp"
#include "arsum/corpus.hpp"
#include "arsum/json.hpp"

namespace arsum {

class CandidateSet;

/// Recall, precision and F1 for one metric variant on one pair.
///
/// A zero denominator yields 0 for the affected value and sets the matching
/// degenerate flag instead of failing, so a one-token reference never aborts
/// corpus scoring.
struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  bool recall_degenerate = false;
  bool precision_degenerate = false;

  bool degenerate() const { return recall_degenerate || precision_degenerate; }

  /// Builds a score from match counts; f1 is the harmonic mean or 0.
  static RougeScore from_counts(double matches, double reference_total,
                                double candidate_total);
};

enum class RougeKind { kN, kL, kLsum };

struct RougeVariant {
  RougeKind kind = RougeKind::kN;
  std::size_t n = 1;  // only meaningful for kN

  static RougeVariant N(std::size_t n);
  static RougeVariant L() { return {RougeKind::kL, 0}; }
  static RougeVariant Lsum() { return {RougeKind::kLsum, 0}; }

  /// "rouge1", "rouge2", "rougeL", "rougeLsum".
  std::string name() const;
  bool operator==(const RougeVariant&) const = default;
};

/// The four variants every pair report carries, in report order.
inline constexpr std::size_t kVariantCount = 4;
std::array<RougeVariant, kVariantCount> standard_variants();

/// Clipped n-gram recall and precision. Throws InvalidNError for n = 0.
RougeScore rouge_n(const TokenSequence& reference, const TokenSequence& candidate,
                   std::size_t n);

/// Longest common subsequence length, O(|x|·|y|) time, O(min) memory.
std::size_t lcs_length(const TokenSequence& x, const TokenSequence& y);

/// LCS over whole sequences: recall = LCS / |reference|.
RougeScore rouge_l(const TokenSequence& reference, const TokenSequence& candidate);

/// Sentence-level union-LCS. Each reference sentence takes the union of its
/// LCS matches against every candidate sentence; a token is credited at most
/// as often as it occurs in both summaries.
RougeScore rouge_l_sum(const std::vector<TokenSequence>& reference_sentences,
                       const std::vector<TokenSequence>& candidate_sentences);

struct PairReport {
  std::string record_id;
  std::array<RougeScore, kVariantCount> scores;  // rouge1, rouge2, rougeL, rougeLsum
  NormalizationConfig normalization;

  const RougeScore& rouge1() const { return scores[0]; }
  const RougeScore& rouge2() const { return scores[1]; }
  const RougeScore& rouge_l() const { return scores[2]; }
  const RougeScore& rouge_lsum() const { return scores[3]; }
};

/// Normalizes, tokenizes and segments both texts, then scores all four
/// variants. Throws EmptyReferenceError when the reference normalizes to
/// nothing.
PairReport score_pair(std::string_view reference, std::string_view candidate,
                      const NormalizationConfig& config, std::string record_id = {});

/// Macro-averaged recall/precision/F1 for one variant.
struct RougeAverage {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  bool operator==(const RougeAverage&) const = default;
};

struct CorpusRougeSummary {
  std::string model_name;
  std::array<RougeAverage, kVariantCount> averages;
  std::size_t record_count = 0;
  NormalizationConfig normalization;
  std::string subset;  // split name, empty when scoring an ad-hoc id list
  std::uint64_t seed = 0;
  std::vector<std::string> forced_missing_ids;  // scored as empty with --force
};

struct ScoreOptions {
  /// Score absent candidates as empty summaries instead of failing.
  bool force = false;
  CleaningConfig cleaning;
};

/// Scores `ids` (reduced in the given order) and macro-averages each value.
/// Throws MissingRecordError, MissingCandidateError, EmptyInputError.
CorpusRougeSummary score_set(const Corpus& corpus, const CandidateSet& candidates,
                             const std::vector<std::string>& ids,
                             const NormalizationConfig& config,
                             const ScoreOptions& options = {});

/// Per-record reports in the same order score_set reduces them.
std::vector<PairReport> score_records(const Corpus& corpus, const CandidateSet& candidates,
                                      const std::vector<std::string>& ids,
                                      const NormalizationConfig& config,
                                      const ScoreOptions& options = {});

Json to_json(const RougeScore& score);
Json to_json(const PairReport& report);
Json to_json(const CorpusRougeSummary& summary);

/// Fixed-point decimal rendering, e.g. display(0.24617, 4) == "0.2462".
std::string display(double value, int decimals);

}  // namespace arsum

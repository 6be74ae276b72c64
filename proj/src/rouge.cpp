#include "arsum/rouge.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "arsum/candidates.hpp"
#include "arsum/error.hpp"

namespace arsum {

RougeScore RougeScore::from_counts(double matches, double reference_total,
                                   double candidate_total) {
  RougeScore s;
  if (reference_total > 0) s.recall = matches / reference_total;
  else s.recall_degenerate = true;
  if (candidate_total > 0) s.precision = matches / candidate_total;
  else s.precision_degenerate = true;
  if (s.recall + s.precision > 0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

RougeVariant RougeVariant::N(std::size_t n) {
  if (n == 0) throw InvalidNError("ROUGE-N needs n >= 1");
  return {RougeKind::kN, n};
}

std::string RougeVariant::name() const {
  switch (kind) {
    case RougeKind::kN: return "rouge" + std::to_string(n);
    case RougeKind::kL: return "rougeL";
    case RougeKind::kLsum: return "rougeLsum";
  }
  return "rouge";
}

std::array<RougeVariant, kVariantCount> standard_variants() {
  return {RougeVariant::N(1), RougeVariant::N(2), RougeVariant::L(), RougeVariant::Lsum()};
}

RougeScore rouge_n(const TokenSequence& reference, const TokenSequence& candidate,
                   std::size_t n) {
  const NgramCounts ref = ngrams(reference, n);
  const NgramCounts cand = ngrams(candidate, n);
  std::size_t ref_total = 0;
  std::size_t matches = 0;
  for (const auto& [gram, count] : ref) {
    ref_total += count;
    if (auto it = cand.find(gram); it != cand.end()) matches += std::min(count, it->second);
  }
  std::size_t cand_total = 0;
  for (const auto& [_, count] : cand) cand_total += count;
  return RougeScore::from_counts(static_cast<double>(matches), static_cast<double>(ref_total),
                                 static_cast<double>(cand_total));
}

std::size_t lcs_length(const TokenSequence& x, const TokenSequence& y) {
  const auto& a = x.size() >= y.size() ? x.tokens : y.tokens;
  const auto& b = x.size() >= y.size() ? y.tokens : x.tokens;
  if (b.empty()) return 0;
  // Two rows over the shorter sequence.
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenSequence& reference, const TokenSequence& candidate) {
  const auto lcs = static_cast<double>(lcs_length(reference, candidate));
  return RougeScore::from_counts(lcs, static_cast<double>(reference.size()),
                                 static_cast<double>(candidate.size()));
}

namespace {

// Indices into `ref` of one LCS against `cand`. Backtracking prefers the
// diagonal on a match, then the left cell when it is strictly larger, else
// moves up; this tie-break decides which LCS the union sees.
std::vector<std::size_t> lcs_reference_positions(const std::vector<std::string>& ref,
                                                 const std::vector<std::string>& cand) {
  const std::size_t m = ref.size(), n = cand.size();
  std::vector<std::size_t> table((m + 1) * (n + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return table[i * (n + 1) + j]; };
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      at(i, j) = ref[i - 1] == cand[j - 1] ? at(i - 1, j - 1) + 1
                                           : std::max(at(i - 1, j), at(i, j - 1));
    }
  }
  std::vector<std::size_t> positions;
  std::size_t i = m, j = n;
  while (i > 0 && j > 0) {
    if (ref[i - 1] == cand[j - 1]) {
      positions.push_back(i - 1);
      --i;
      --j;
    } else if (at(i, j - 1) > at(i - 1, j)) {
      --j;
    } else {
      --i;
    }
  }
  std::reverse(positions.begin(), positions.end());
  return positions;
}

}  // namespace

RougeScore rouge_l_sum(const std::vector<TokenSequence>& reference_sentences,
                       const std::vector<TokenSequence>& candidate_sentences) {
  std::map<std::string, std::size_t> ref_budget, cand_budget;
  std::size_t ref_total = 0, cand_total = 0;
  for (const auto& s : reference_sentences) {
    for (const auto& t : s.tokens) ++ref_budget[t];
    ref_total += s.size();
  }
  for (const auto& s : candidate_sentences) {
    for (const auto& t : s.tokens) ++cand_budget[t];
    cand_total += s.size();
  }

  std::size_t hits = 0;
  for (const auto& ref : reference_sentences) {
    std::set<std::size_t> union_positions;
    for (const auto& cand : candidate_sentences) {
      for (auto p : lcs_reference_positions(ref.tokens, cand.tokens)) union_positions.insert(p);
    }
    for (auto p : union_positions) {
      const auto& token = ref.tokens[p];
      auto r = ref_budget.find(token);
      auto c = cand_budget.find(token);
      if (r != ref_budget.end() && c != cand_budget.end() && r->second > 0 && c->second > 0) {
        ++hits;
        --r->second;
        --c->second;
      }
    }
  }
  return RougeScore::from_counts(static_cast<double>(hits), static_cast<double>(ref_total),
                                 static_cast<double>(cand_total));
}

PairReport score_pair(std::string_view reference, std::string_view candidate,
                      const NormalizationConfig& config, std::string record_id) {
  const TokenSequence ref = tokenize_words(normalize(reference, config));
  if (ref.empty()) {
    throw EmptyReferenceError("reference" + (record_id.empty() ? "" : " for '" + record_id + "'") +
                              " is empty after normalization");
  }
  const TokenSequence cand = tokenize_words(normalize(candidate, config));
  const auto ref_sentences = tokenize_sentences(reference, config);
  const auto cand_sentences = tokenize_sentences(candidate, config);

  PairReport report;
  report.record_id = std::move(record_id);
  report.normalization = config;
  report.scores[0] = rouge_n(ref, cand, 1);
  report.scores[1] = rouge_n(ref, cand, 2);
  report.scores[2] = rouge_l(ref, cand);
  report.scores[3] = rouge_l_sum(ref_sentences, cand_sentences);
  return report;
}

std::vector<PairReport> score_records(const Corpus& corpus, const CandidateSet& candidates,
                                      const std::vector<std::string>& ids,
                                      const NormalizationConfig& config,
                                      const ScoreOptions& options) {
  std::vector<std::string> missing_records, missing_candidates;
  for (const auto& id : ids) {
    if (!corpus.contains(id)) missing_records.push_back(id);
    else if (!candidates.contains(id)) missing_candidates.push_back(id);
  }
  auto joined = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
  };
  if (!missing_records.empty()) {
    throw MissingRecordError("ids not in corpus: " + joined(missing_records));
  }
  if (!missing_candidates.empty() && !options.force) {
    throw MissingCandidateError("model '" + candidates.model_name() +
                                "' has no summary for: " + joined(missing_candidates));
  }

  std::vector<PairReport> reports;
  reports.reserve(ids.size());
  for (const auto& id : ids) {
    const CorpusRecord& rec = *corpus.find(id);
    const std::string* summary = candidates.find(id);
    const std::string reference = clean_text(rec.expert_summary, options.cleaning);
    const std::string candidate = summary ? clean_text(*summary, options.cleaning) : std::string();
    reports.push_back(score_pair(reference, candidate, config, id));
  }
  return reports;
}

CorpusRougeSummary score_set(const Corpus& corpus, const CandidateSet& candidates,
                             const std::vector<std::string>& ids,
                             const NormalizationConfig& config, const ScoreOptions& options) {
  if (ids.empty()) throw EmptyInputError("no record ids to score");
  const auto reports = score_records(corpus, candidates, ids, config, options);

  CorpusRougeSummary summary;
  summary.model_name = candidates.model_name();
  summary.record_count = reports.size();
  summary.normalization = config;
  for (const auto& id : ids) {
    if (!candidates.contains(id)) summary.forced_missing_ids.push_back(id);
  }
  for (std::size_t v = 0; v < kVariantCount; ++v) {
    double r = 0, p = 0, f = 0;
    for (const auto& rep : reports) {
      r += rep.scores[v].recall;
      p += rep.scores[v].precision;
      f += rep.scores[v].f1;
    }
    const auto n = static_cast<double>(reports.size());
    summary.averages[v] = {r / n, p / n, f / n};
  }
  return summary;
}

std::string display(double value, int decimals) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) return "nan";
  std::string out(buf, ptr);
  // -0.0000 reads as a sign error in a table.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

Json to_json(const RougeScore& score) {
  Json j;
  j["recall"] = score.recall;
  j["precision"] = score.precision;
  j["f1"] = score.f1;
  j["recall_display"] = display(score.recall, 4);
  j["precision_display"] = display(score.precision, 4);
  j["f1_display"] = display(score.f1, 4);
  j["recall_degenerate"] = score.recall_degenerate;
  j["precision_degenerate"] = score.precision_degenerate;
  return j;
}

Json to_json(const PairReport& report) {
  Json j;
  j["record_id"] = report.record_id;
  j["normalization"] = report.normalization;
  const auto variants = standard_variants();
  Json scores;
  for (std::size_t v = 0; v < kVariantCount; ++v) scores[variants[v].name()] = to_json(report.scores[v]);
  j["scores"] = scores;
  return j;
}

Json to_json(const CorpusRougeSummary& summary) {
  Json j;
  j["model_name"] = summary.model_name;
  j["record_count"] = summary.record_count;
  j["aggregation"] = "macro";
  j["subset"] = summary.subset;
  j["seed"] = summary.seed;
  j["normalization"] = summary.normalization;
  const auto variants = standard_variants();
  Json avg;
  for (std::size_t v = 0; v < kVariantCount; ++v) {
    const auto& a = summary.averages[v];
    avg[variants[v].name()] = {{"recall", a.recall},
                               {"precision", a.precision},
                               {"f1", a.f1},
                               {"recall_display", display(a.recall, 4)},
                               {"precision_display", display(a.precision, 4)},
                               {"f1_display", display(a.f1, 4)}};
  }
  j["averages"] = avg;
  j["forced_missing_ids"] = summary.forced_missing_ids;
  return j;
}

}  // namespace arsum

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arsum/aratext.hpp"
#include "arsum/candidates.hpp"
#include "arsum/corpus.hpp"
#include "arsum/json.hpp"
#include "arsum/rouge.hpp"

namespace arsum {

enum class ReportFormat { kJson, kCsv, kMarkdown };

ReportFormat parse_report_format(std::string_view name);
std::string_view extension(ReportFormat format);

// ---------------------------------------------------------------------------
// ROUGE table: one row per model, headline value = macro recall.

struct RougeTableRow {
  std::string model_name;
  RougeAverage rouge1;
  RougeAverage rouge2;
  RougeAverage rouge_l;
  RougeAverage rouge_lsum;

  bool operator==(const RougeTableRow&) const = default;
};

struct RougeProvenance {
  NormalizationConfig normalization;
  std::string subset;
  std::uint64_t seed = 0;
  std::size_t record_count = 0;
  std::string aggregation = "macro-recall";

  bool operator==(const RougeProvenance&) const = default;
};

struct RougeTable {
  std::vector<RougeTableRow> rows;  // rouge1 recall descending, then name
  RougeProvenance provenance;
  bool include_lsum = false;

  bool operator==(const RougeTable&) const = default;
};

/// Throws EmptyInputError for no summaries and MixedProvenanceError when the
/// summaries disagree on normalization, subset, seed or record count.
RougeTable build_rouge_table(const std::vector<CorpusRougeSummary>& summaries,
                             bool include_lsum = false);

// ---------------------------------------------------------------------------
// Expert table: mean 1-10 rating per model.

struct ExpertRow {
  std::string model_name;
  double mean_rating = 0.0;
  std::size_t rating_count = 0;

  bool operator==(const ExpertRow&) const = default;
};

struct ExpertTable {
  std::vector<ExpertRow> rows;  // mean descending, then name

  bool operator==(const ExpertTable&) const = default;
};

/// Throws EmptyInputError, or OutOfRangeError for a zero count or a mean
/// outside [1, 10].
ExpertTable build_expert_table(const std::vector<ExpertRow>& aggregates);

// ---------------------------------------------------------------------------
// Side-by-side comparison for one record.

struct ComparisonEntry {
  std::string model_name;
  std::optional<std::string> summary;  // nullopt renders as "absent"

  bool operator==(const ComparisonEntry&) const = default;
};

struct ComparisonSheet {
  std::string record_id;
  std::string original_text;
  std::string expert_summary;
  std::vector<ComparisonEntry> candidates;  // declared order

  bool operator==(const ComparisonSheet&) const = default;
};

/// Throws UnknownIdError when `id` is not in the corpus.
ComparisonSheet build_comparison(const Corpus& corpus,
                                 const std::vector<CandidateSet>& candidate_sets,
                                 std::string_view id);

// ---------------------------------------------------------------------------
// Rendering. Output is byte-deterministic: LF line endings, UTF-8 as-is.

std::string render(const RougeTable& table, ReportFormat format);
std::string render(const ExpertTable& table, ReportFormat format);
std::string render(const ComparisonSheet& sheet, ReportFormat format);

/// Inverse of the JSON renderers. Throw SchemaError.
RougeTable rouge_table_from_json(const Json& j);
ExpertTable expert_table_from_json(const Json& j);
ComparisonSheet comparison_from_json(const Json& j);

/// RFC 4180 cell quoting: only cells holding a comma, quote, CR or LF.
std::string csv_escape(std::string_view cell);

}  // namespace arsum

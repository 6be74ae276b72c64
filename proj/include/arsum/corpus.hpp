#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arsum/json.hpp"

namespace arsum {

/// One textbook section with its expert reference summary.
struct CorpusRecord {
  std::string id;
  std::string unit_title;
  std::string lesson_title;
  std::string section_content;
  std::optional<std::string> questions;
  std::string expert_summary;

  bool operator==(const CorpusRecord&) const = default;
};

struct Provenance {
  std::string source_path;
  std::string loaded_at;  // ISO-8601 UTC
};

class Corpus {
 public:
  Corpus() = default;
  /// Throws DuplicateIdError or SchemaError (empty id).
  explicit Corpus(std::vector<CorpusRecord> records, Provenance provenance = {});

  const std::vector<CorpusRecord>& records() const { return records_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const CorpusRecord* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::vector<std::string> ids() const;

 private:
  std::vector<CorpusRecord> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
  Provenance provenance_;
};

enum class CorpusFormat { kJsonl, kCsv };

/// Guesses from the extension: ".csv" is CSV, everything else JSONL.
CorpusFormat format_from_path(const std::filesystem::path& path);

Corpus parse_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_corpus_jsonl(std::string_view content, std::string source = "<memory>");
Corpus parse_corpus_csv(std::string_view content, std::string source = "<memory>");

std::string serialize_corpus_jsonl(const Corpus& corpus);
std::string serialize_corpus_csv(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Cleaning

struct CleaningConfig {
  /// Class names: "control", "zero_width", "tatweel".
  std::set<std::string> remove_classes{"control", "zero_width", "tatweel"};
  std::set<char32_t> extra_codepoints;
  bool lowercase_latin = true;

  bool operator==(const CleaningConfig&) const = default;
};

CleaningConfig parse_cleaning_config(const Json& j);
Json to_json(const CleaningConfig& config);

struct CleaningReport {
  std::size_t records_in = 0;
  std::size_t records_out = 0;
  std::size_t records_dropped_empty = 0;
  std::map<std::string, std::size_t> chars_removed_by_class;
  std::size_t fields_modified = 0;
  std::vector<std::string> dropped_ids;
};

Json to_json(const CleaningReport& report);

/// Deletes removable characters, trims, collapses whitespace runs to one
/// space and lowercases Latin letters. Idempotent.
std::string clean_text(std::string_view raw, const CleaningConfig& config = {});

/// As clean_text, tallying deleted characters per class into `removed`.
std::string clean_text(std::string_view raw, const CleaningConfig& config,
                       std::map<std::string, std::size_t>& removed);

struct CleanedCorpus {
  Corpus corpus;
  CleaningReport report;
};

/// Throws EmptyCorpusError when every record is dropped.
CleanedCorpus clean_corpus(const Corpus& corpus, const CleaningConfig& config = {});

// ---------------------------------------------------------------------------
// Profiling

struct HistogramBucket {
  std::size_t lower = 0;  // inclusive
  std::size_t upper = 0;  // exclusive
  std::size_t count = 0;
};

struct LengthProfile {
  std::string field;
  std::size_t bucket_width = 0;
  std::vector<std::size_t> word_counts;  // corpus order
  std::vector<HistogramBucket> buckets;  // contiguous from 0
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
  double median = 0.0;
};

Json to_json(const LengthProfile& profile);
std::string render_histogram(const LengthProfile& profile);

/// `field` is one of unit_title, lesson_title, section_content, questions,
/// expert_summary. Throws UnknownFieldError, EmptyCorpusError, ConfigError
/// (zero bucket width).
LengthProfile length_profile(const Corpus& corpus, std::string_view field,
                             std::size_t bucket_width);

// ---------------------------------------------------------------------------
// Splitting

enum class Subset { kTrain, kValidation, kTest };

Subset parse_subset(std::string_view name);
std::string_view to_string(Subset subset);

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::vector<std::string> test_ids;

  const std::vector<std::string>& ids(Subset subset) const;
  bool operator==(const SplitAssignment&) const = default;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// floor(0.7 N) train; the remainder halves with validation taking the odd one.
SplitSizes split_sizes(std::size_t n);

/// Seeded Fisher-Yates over corpus order, then sized by split_sizes. Each id
/// list is reported in corpus order. Throws CorpusTooSmallError for N < 3.
SplitAssignment split_corpus(const Corpus& corpus, std::uint64_t seed);

Json to_json(const SplitAssignment& split);
SplitAssignment parse_split(const Json& j);
SplitAssignment read_split(const std::filesystem::path& path);

}  // namespace arsum

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arsum/corpus.hpp"
#include "arsum/json.hpp"

namespace arsum {

/// Training hyperparameters recorded with a candidate set. Carried verbatim
/// for provenance; scoring never reads them.
struct ModelCard {
  std::string checkpoint;
  long long epochs = 0;
  double learning_rate = 0.0;
  double weight_decay = 0.0;
  long long batch_size = 0;
  std::string optimizer;
  long long max_input_tokens = 0;
  long long max_summary_tokens = 0;

  bool operator==(const ModelCard&) const = default;
};

/// Throws SchemaError on missing, unknown or non-positive fields.
ModelCard parse_model_card(const Json& j);
Json to_json(const ModelCard& card);

/// One model's summaries keyed by record id, in file order.
class CandidateSet {
 public:
  CandidateSet() = default;
  /// Throws MissingModelNameError or DuplicateIdError.
  CandidateSet(std::string model_name, std::optional<ModelCard> card = std::nullopt);

  const std::string& model_name() const { return model_name_; }
  const std::optional<ModelCard>& model_card() const { return card_; }

  /// Throws DuplicateIdError when `id` is already present.
  void add(std::string id, std::string summary);

  const std::string* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::size_t size() const { return entries_.size(); }

  /// (id, summary) pairs in insertion order.
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::string model_name_;
  std::optional<ModelCard> card_;
  std::vector<std::pair<std::string, std::string>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads candidate JSONL: a header line {"model_name", "model_card"?} then
/// {"id", "summary"} lines. When the first line is not a header, the header
/// is taken from a sidecar "<path>.meta.json".
CandidateSet parse_candidates(const std::filesystem::path& path);
CandidateSet parse_candidates_jsonl(std::string_view content,
                                    std::optional<Json> sidecar_header = std::nullopt);
std::string serialize_candidates(const CandidateSet& set);

struct AlignmentReport {
  std::vector<std::string> matched_ids;  // split order
  std::vector<std::string> missing_ids;  // in the split, not in the candidates
  std::vector<std::string> extra_ids;    // in the candidates, not in the split

  bool complete() const { return missing_ids.empty(); }
};

AlignmentReport align(const CandidateSet& candidates, const SplitAssignment& split,
                      Subset which);
AlignmentReport align(const CandidateSet& candidates, const std::vector<std::string>& ids);

Json to_json(const AlignmentReport& report);

}  // namespace arsum

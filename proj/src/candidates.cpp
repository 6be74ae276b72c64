#include "arsum/candidates.hpp"

#include <set>
#include <unordered_set>

#include "arsum/error.hpp"
#include "arsum/io.hpp"
#include "arsum/unicode.hpp"

namespace arsum {

namespace {

template <typename T>
T positive_field(const Json& j, const char* name) {
  if (!j.contains(name)) throw SchemaError(std::string("model_card: missing field '") + name + "'");
  const auto& v = j.at(name);
  if (!v.is_number()) throw SchemaError(std::string("model_card: '") + name + "' must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw SchemaError(std::string("model_card: '") + name + "' must be an integer");
    }
  }
  const T value = v.get<T>();
  if (!(value > 0)) throw SchemaError(std::string("model_card: '") + name + "' must be positive");
  return value;
}

std::string string_field(const Json& j, const char* name, const std::string& context) {
  if (!j.contains(name)) throw SchemaError(context + ": missing field '" + name + "'");
  const auto& v = j.at(name);
  if (!v.is_string()) throw SchemaError(context + ": '" + name + "' must be a string");
  auto s = v.get<std::string>();
  if (!unicode::is_valid_utf8(s)) throw SchemaError(context + ": invalid UTF-8");
  return s;
}

}  // namespace

ModelCard parse_model_card(const Json& j) {
  if (!j.is_object()) throw SchemaError("model_card must be an object");
  static const std::set<std::string> known = {
      "checkpoint", "epochs", "learning_rate", "weight_decay", "batch_size",
      "optimizer", "max_input_tokens", "max_summary_tokens"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw SchemaError("model_card: unknown field '" + key + "'");
  }
  ModelCard card;
  card.checkpoint = string_field(j, "checkpoint", "model_card");
  card.epochs = positive_field<long long>(j, "epochs");
  card.learning_rate = positive_field<double>(j, "learning_rate");
  card.weight_decay = positive_field<double>(j, "weight_decay");
  card.batch_size = positive_field<long long>(j, "batch_size");
  card.optimizer = string_field(j, "optimizer", "model_card");
  card.max_input_tokens = positive_field<long long>(j, "max_input_tokens");
  card.max_summary_tokens = positive_field<long long>(j, "max_summary_tokens");
  return card;
}

Json to_json(const ModelCard& card) {
  Json j;
  j["checkpoint"] = card.checkpoint;
  j["epochs"] = card.epochs;
  j["learning_rate"] = card.learning_rate;
  j["weight_decay"] = card.weight_decay;
  j["batch_size"] = card.batch_size;
  j["optimizer"] = card.optimizer;
  j["max_input_tokens"] = card.max_input_tokens;
  j["max_summary_tokens"] = card.max_summary_tokens;
  return j;
}

CandidateSet::CandidateSet(std::string model_name, std::optional<ModelCard> card)
    : model_name_(std::move(model_name)), card_(std::move(card)) {
  if (model_name_.empty()) throw MissingModelNameError("candidate set has no model_name");
}

void CandidateSet::add(std::string id, std::string summary) {
  if (id.empty()) throw SchemaError("candidate id is empty");
  if (index_.count(id)) throw DuplicateIdError("candidate id '" + id + "' appears twice");
  index_.emplace(id, entries_.size());
  entries_.emplace_back(std::move(id), std::move(summary));
}

const std::string* CandidateSet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

namespace {

CandidateSet from_header(const Json& header, const std::string& context) {
  if (!header.is_object()) throw SchemaError(context + ": header must be an object");
  for (const auto& [key, _] : header.items()) {
    if (key != "model_name" && key != "model_card") {
      throw SchemaError(context + ": unknown header field '" + key + "'");
    }
  }
  if (!header.contains("model_name") || !header.at("model_name").is_string() ||
      header.at("model_name").get<std::string>().empty()) {
    throw MissingModelNameError(context + ": header has no model_name");
  }
  std::optional<ModelCard> card;
  if (header.contains("model_card") && !header.at("model_card").is_null()) {
    card = parse_model_card(header.at("model_card"));
  }
  return CandidateSet(header.at("model_name").get<std::string>(), std::move(card));
}

}  // namespace

CandidateSet parse_candidates_jsonl(std::string_view content, std::optional<Json> sidecar_header) {
  std::optional<CandidateSet> set;
  if (sidecar_header) set = from_header(*sidecar_header, "sidecar");
  const auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::string row = "row " + std::to_string(ln + 1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(row + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw SchemaError(row + ": expected a JSON object");
    if (!set) {
      if (!obj.contains("model_name")) {
        throw MissingModelNameError(row + ": first line must carry model_name");
      }
      set = from_header(obj, row);
      continue;
    }
    for (const auto& [key, _] : obj.items()) {
      if (key != "id" && key != "summary") {
        throw SchemaError(row + ": unknown field '" + key + "'");
      }
    }
    auto id = string_field(obj, "id", row);
    auto summary = string_field(obj, "summary", row);
    set->add(std::move(id), std::move(summary));
  }
  if (!set) throw MissingModelNameError("candidate file is empty; no model_name");
  return std::move(*set);
}

CandidateSet parse_candidates(const std::filesystem::path& path) {
  const auto content = read_file(path);
  // A header on the first non-blank line wins; otherwise look for a sidecar.
  std::optional<Json> sidecar;
  for (auto line : split_lines(content)) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Json first;
    try {
      first = Json::parse(line);
    } catch (const nlohmann::json::exception&) {
      break;
    }
    if (first.is_object() && !first.contains("model_name")) {
      auto meta = path;
      meta += ".meta.json";
      if (std::filesystem::exists(meta)) {
        try {
          sidecar = Json::parse(read_file(meta));
        } catch (const nlohmann::json::exception& e) {
          throw SchemaError(meta.string() + ": malformed JSON: " + e.what());
        }
      }
    }
    break;
  }
  return parse_candidates_jsonl(content, std::move(sidecar));
}

std::string serialize_candidates(const CandidateSet& set) {
  Json header;
  header["model_name"] = set.model_name();
  if (set.model_card()) header["model_card"] = to_json(*set.model_card());
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& [id, summary] : set.entries()) {
    Json line;
    line["id"] = id;
    line["summary"] = summary;
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

AlignmentReport align(const CandidateSet& candidates, const std::vector<std::string>& ids) {
  AlignmentReport report;
  std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  for (const auto& id : ids) {
    (candidates.contains(id) ? report.matched_ids : report.missing_ids).push_back(id);
  }
  for (const auto& [id, _] : candidates.entries()) {
    if (!wanted.count(id)) report.extra_ids.push_back(id);
  }
  return report;
}

AlignmentReport align(const CandidateSet& candidates, const SplitAssignment& split,
                      Subset which) {
  return align(candidates, split.ids(which));
}

Json to_json(const AlignmentReport& report) {
  Json j;
  j["matched_ids"] = report.matched_ids;
  j["missing_ids"] = report.missing_ids;
  j["extra_ids"] = report.extra_ids;
  return j;
}

}  // namespace arsum

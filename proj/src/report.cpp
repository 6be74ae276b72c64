#include "arsum/report.hpp"

#include <algorithm>
#include <sstream>

#include "arsum/error.hpp"

namespace arsum {

namespace {

constexpr const char* kExpertHeader = "Rating (0 – 10)";

std::string describe(const NormalizationConfig& c) {
  std::vector<std::string> on;
  if (c.strip_tatweel) on.push_back("strip_tatweel");
  if (c.strip_diacritics) on.push_back("strip_diacritics");
  if (c.normalize_alef) on.push_back("normalize_alef");
  if (c.normalize_ta_marbuta) on.push_back("normalize_ta_marbuta");
  if (c.fold_latin_case) on.push_back("fold_latin_case");
  if (c.strip_punctuation) on.push_back("strip_punctuation");
  std::string out = c.profile + " (";
  for (std::size_t i = 0; i < on.size(); ++i) out += (i ? ", " : "") + on[i];
  if (on.empty()) out += "no transforms";
  return out + ")";
}

// Markdown cells cannot hold raw pipes or newlines.
std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += "<br>";
    else if (c != '\r') out.push_back(c);
  }
  return out;
}

Json average_json(const RougeAverage& a) {
  Json j;
  j["recall"] = a.recall;
  j["precision"] = a.precision;
  j["f1"] = a.f1;
  j["display"] = display(a.recall, 4);
  return j;
}

RougeAverage average_from_json(const Json& j) {
  return {j.at("recall").get<double>(), j.at("precision").get<double>(),
          j.at("f1").get<double>()};
}

template <typename F>
auto schema_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

std::string_view extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson: return "json";
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kMarkdown: return "md";
  }
  return "txt";
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------

RougeTable build_rouge_table(const std::vector<CorpusRougeSummary>& summaries, bool include_lsum) {
  if (summaries.empty()) throw EmptyInputError("no ROUGE summaries to tabulate");
  const auto& first = summaries.front();
  for (const auto& s : summaries) {
    if (!s.normalization.same_transforms(first.normalization) ||
        s.normalization.profile != first.normalization.profile) {
      throw MixedProvenanceError("model '" + s.model_name + "' used normalization " +
                                 describe(s.normalization) + ", expected " +
                                 describe(first.normalization));
    }
    if (s.subset != first.subset || s.seed != first.seed) {
      throw MixedProvenanceError("model '" + s.model_name + "' was scored on a different split");
    }
    if (s.record_count != first.record_count) {
      throw MixedProvenanceError("model '" + s.model_name + "' was scored on " +
                                 std::to_string(s.record_count) + " records, expected " +
                                 std::to_string(first.record_count));
    }
  }
  RougeTable table;
  table.include_lsum = include_lsum;
  table.provenance = {first.normalization, first.subset, first.seed, first.record_count,
                      "macro-recall"};
  for (const auto& s : summaries) {
    table.rows.push_back({s.model_name, s.averages[0], s.averages[1], s.averages[2], s.averages[3]});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const RougeTableRow& a, const RougeTableRow& b) {
                     if (a.rouge1.recall != b.rouge1.recall) return a.rouge1.recall > b.rouge1.recall;
                     return a.model_name < b.model_name;
                   });
  return table;
}

ExpertTable build_expert_table(const std::vector<ExpertRow>& aggregates) {
  if (aggregates.empty()) throw EmptyInputError("no expert aggregates to tabulate");
  ExpertTable table;
  for (const auto& row : aggregates) {
    if (row.rating_count == 0) {
      throw OutOfRangeError("model '" + row.model_name + "' has no ratings");
    }
    if (!(row.mean_rating >= 1.0 && row.mean_rating <= 10.0)) {
      throw OutOfRangeError("model '" + row.model_name + "' mean rating " +
                            display(row.mean_rating, 3) + " is outside [1, 10]");
    }
    table.rows.push_back(row);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const ExpertRow& a, const ExpertRow& b) {
    if (a.mean_rating != b.mean_rating) return a.mean_rating > b.mean_rating;
    return a.model_name < b.model_name;
  });
  return table;
}

ComparisonSheet build_comparison(const Corpus& corpus,
                                 const std::vector<CandidateSet>& candidate_sets,
                                 std::string_view id) {
  const CorpusRecord* rec = corpus.find(id);
  if (!rec) throw UnknownIdError("id '" + std::string(id) + "' is not in the corpus");
  ComparisonSheet sheet;
  sheet.record_id = rec->id;
  sheet.original_text = rec->section_content;
  sheet.expert_summary = rec->expert_summary;
  for (const auto& set : candidate_sets) {
    ComparisonEntry entry{set.model_name(), std::nullopt};
    if (const std::string* s = set.find(id)) entry.summary = *s;
    sheet.candidates.push_back(std::move(entry));
  }
  return sheet;
}

// ---------------------------------------------------------------------------

std::string render(const RougeTable& table, ReportFormat format) {
  const auto& prov = table.provenance;
  if (format == ReportFormat::kJson) {
    Json j;
    j["kind"] = "rouge_table";
    j["provenance"] = {{"normalization", prov.normalization},
                       {"subset", prov.subset},
                       {"seed", prov.seed},
                       {"record_count", prov.record_count},
                       {"aggregation", prov.aggregation},
                       {"include_lsum", table.include_lsum}};
    Json rows = Json::array();
    for (const auto& r : table.rows) {
      Json row;
      row["model"] = r.model_name;
      row["rouge1"] = average_json(r.rouge1);
      row["rouge2"] = average_json(r.rouge2);
      row["rougeL"] = average_json(r.rouge_l);
      row["rougeLsum"] = average_json(r.rouge_lsum);
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
  }

  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << "Model,rouge1,rouge2,rougeL" << (table.include_lsum ? ",rougeLsum" : "") << '\n';
    for (const auto& r : table.rows) {
      out << csv_escape(r.model_name) << ',' << display(r.rouge1.recall, 4) << ','
          << display(r.rouge2.recall, 4) << ',' << display(r.rouge_l.recall, 4);
      if (table.include_lsum) out << ',' << display(r.rouge_lsum.recall, 4);
      out << '\n';
    }
    return out.str();
  }

  out << "## ROUGE scores\n\n";
  out << "| Model | rouge1 | rouge2 | rougeL |" << (table.include_lsum ? " rougeLsum |" : "") << '\n';
  out << "|---|---|---|---|" << (table.include_lsum ? "---|" : "") << '\n';
  for (const auto& r : table.rows) {
    out << "| " << md_cell(r.model_name) << " | " << display(r.rouge1.recall, 4) << " | "
        << display(r.rouge2.recall, 4) << " | " << display(r.rouge_l.recall, 4) << " |";
    if (table.include_lsum) out << ' ' << display(r.rouge_lsum.recall, 4) << " |";
    out << '\n';
  }
  out << "\n- normalization: " << describe(prov.normalization) << '\n';
  out << "- split: " << (prov.subset.empty() ? "(ad hoc ids)" : prov.subset) << ", seed "
      << prov.seed << '\n';
  out << "- records: " << prov.record_count << '\n';
  out << "- aggregation: " << prov.aggregation << '\n';
  return out.str();
}

std::string render(const ExpertTable& table, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    Json j;
    j["kind"] = "expert_table";
    j["provenance"] = {{"scale", "integer 1-10"}, {"aggregation", "mean over all ratings"}};
    Json rows = Json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"model", r.model_name},
                      {"mean_rating", r.mean_rating},
                      {"display", display(r.mean_rating, 3)},
                      {"rating_count", r.rating_count}});
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << "Model,mean_rating,rating_count\n";
    for (const auto& r : table.rows) {
      out << csv_escape(r.model_name) << ',' << display(r.mean_rating, 3) << ','
          << r.rating_count << '\n';
    }
    return out.str();
  }
  out << "## Expert ratings\n\n";
  out << "| Model | " << kExpertHeader << " |\n";
  out << "|---|---|\n";
  for (const auto& r : table.rows) {
    out << "| " << md_cell(r.model_name) << " | " << display(r.mean_rating, 3) << " |\n";
  }
  out << "\n- scale: integer 1-10, mean over all ratings\n";
  out << "- ratings:";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out << (i ? ", " : " ") << md_cell(table.rows[i].model_name) << ' '
        << table.rows[i].rating_count;
  }
  out << '\n';
  return out.str();
}

std::string render(const ComparisonSheet& sheet, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    Json j;
    j["kind"] = "comparison";
    j["record_id"] = sheet.record_id;
    j["original_text"] = sheet.original_text;
    j["expert_summary"] = sheet.expert_summary;
    Json models = Json::array();
    for (const auto& c : sheet.candidates) {
      models.push_back({{"model", c.model_name},
                        {"summary", c.summary ? Json(*c.summary) : Json(nullptr)}});
    }
    j["candidates"] = std::move(models);
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << "Model,Summary\n";
    out << "Original text," << csv_escape(sheet.original_text) << '\n';
    out << "Expert," << csv_escape(sheet.expert_summary) << '\n';
    for (const auto& c : sheet.candidates) {
      out << csv_escape(c.model_name) << ',' << csv_escape(c.summary.value_or("(absent)")) << '\n';
    }
    return out.str();
  }
  out << "# Record " << sheet.record_id << "\n\n";
  out << "## Original text\n\n" << sheet.original_text << "\n\n";
  out << "## Expert\n\n" << sheet.expert_summary << '\n';
  for (const auto& c : sheet.candidates) {
    out << "\n## " << c.model_name << "\n\n" << (c.summary ? *c.summary : "_(absent)_") << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

RougeTable rouge_table_from_json(const Json& j) {
  return schema_guard("rouge table", [&] {
    if (j.at("kind") != "rouge_table") throw SchemaError("not a rouge_table document");
    RougeTable t;
    const auto& p = j.at("provenance");
    t.provenance.normalization = p.at("normalization").get<NormalizationConfig>();
    t.provenance.subset = p.at("subset").get<std::string>();
    t.provenance.seed = p.at("seed").get<std::uint64_t>();
    t.provenance.record_count = p.at("record_count").get<std::size_t>();
    t.provenance.aggregation = p.at("aggregation").get<std::string>();
    t.include_lsum = p.at("include_lsum").get<bool>();
    for (const auto& r : j.at("rows")) {
      t.rows.push_back({r.at("model").get<std::string>(), average_from_json(r.at("rouge1")),
                        average_from_json(r.at("rouge2")), average_from_json(r.at("rougeL")),
                        average_from_json(r.at("rougeLsum"))});
    }
    return t;
  });
}

ExpertTable expert_table_from_json(const Json& j) {
  return schema_guard("expert table", [&] {
    if (j.at("kind") != "expert_table") throw SchemaError("not an expert_table document");
    ExpertTable t;
    for (const auto& r : j.at("rows")) {
      t.rows.push_back({r.at("model").get<std::string>(), r.at("mean_rating").get<double>(),
                        r.at("rating_count").get<std::size_t>()});
    }
    return t;
  });
}

ComparisonSheet comparison_from_json(const Json& j) {
  return schema_guard("comparison", [&] {
    if (j.at("kind") != "comparison") throw SchemaError("not a comparison document");
    ComparisonSheet s;
    s.record_id = j.at("record_id").get<std::string>();
    s.original_text = j.at("original_text").get<std::string>();
    s.expert_summary = j.at("expert_summary").get<std::string>();
    for (const auto& c : j.at("candidates")) {
      ComparisonEntry e{c.at("model").get<std::string>(), std::nullopt};
      if (!c.at("summary").is_null()) e.summary = c.at("summary").get<std::string>();
      s.candidates.push_back(std::move(e));
    }
    return s;
  });
}

}  // namespace arsum

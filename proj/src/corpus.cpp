#include "arsum/corpus.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "arsum/aratext.hpp"
#include "arsum/error.hpp"
#include "arsum/io.hpp"
#include "arsum/prng.hpp"
#include "arsum/unicode.hpp"

namespace arsum {

namespace uc = unicode;

namespace {

constexpr std::array<std::string_view, 6> kColumns = {
    "id", "unit_title", "lesson_title", "section_content", "questions", "expert_summary"};

std::string row_label(std::size_t row) { return "row " + std::to_string(row); }

// Assigns one named column of a record. Returns false for unknown names.
bool assign_field(CorpusRecord& rec, std::string_view name, std::optional<std::string> value,
                  std::size_t row) {
  auto required = [&](std::string& slot) {
    if (!value) {
      throw SchemaError(row_label(row) + ": field '" + std::string(name) + "' must be a string");
    }
    slot = std::move(*value);
  };
  if (name == "id") required(rec.id);
  else if (name == "unit_title") required(rec.unit_title);
  else if (name == "lesson_title") required(rec.lesson_title);
  else if (name == "section_content") required(rec.section_content);
  else if (name == "expert_summary") required(rec.expert_summary);
  else if (name == "questions") rec.questions = std::move(value);
  else return false;
  return true;
}

void check_utf8(const CorpusRecord& rec, std::size_t row) {
  const auto ctx = row_label(row);
  for (const std::string* s : {&rec.id, &rec.unit_title, &rec.lesson_title,
                               &rec.section_content, &rec.expert_summary}) {
    if (!uc::is_valid_utf8(*s)) throw SchemaError(ctx + ": invalid UTF-8");
  }
  if (rec.questions && !uc::is_valid_utf8(*rec.questions)) {
    throw SchemaError(ctx + ": invalid UTF-8");
  }
}

Corpus build_corpus(std::vector<CorpusRecord> records, const std::vector<std::size_t>& rows,
                    std::string source) {
  if (records.empty()) throw EmptyCorpusError(source + ": no records");
  std::map<std::string, std::size_t, std::less<>> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& id = records[i].id;
    if (id.empty()) throw SchemaError(row_label(rows[i]) + ": field 'id' is empty");
    auto [it, inserted] = seen.emplace(id, rows[i]);
    if (!inserted) {
      throw DuplicateIdError("id '" + id + "' appears in " + row_label(it->second) + " and " +
                             row_label(rows[i]));
    }
  }
  return Corpus(std::move(records), Provenance{std::move(source), utc_timestamp()});
}

// RFC 4180 records: comma separated, double-quoted cells may hold commas,
// quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv_rows(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t i = 0;
  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_row = [&] {
    end_cell();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (i < content.size()) {
    const char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          cell.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        cell.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !cell_started) {
      quoted = true;
      cell_started = true;
    } else if (c == ',') {
      end_cell();
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      end_row();
      ++i;
    } else if (c == '\n') {
      end_row();
    } else {
      cell.push_back(c);
      cell_started = true;
    }
    ++i;
  }
  if (quoted) throw SchemaError("unterminated quoted cell");
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

std::string csv_cell(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Corpus::Corpus(std::vector<CorpusRecord> records, Provenance provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].id.empty()) {
      throw SchemaError("record " + std::to_string(i + 1) + " has an empty id");
    }
    if (!index_.emplace(records_[i].id, i).second) {
      throw DuplicateIdError("duplicate id '" + records_[i].id + "'");
    }
  }
}

const CorpusRecord* Corpus::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.id);
  return out;
}

CorpusFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".csv") return CorpusFormat::kCsv;
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return CorpusFormat::kJsonl;
  throw ConfigError("cannot tell the corpus format of " + path.string() + "; name it .jsonl or .csv");
}

Corpus parse_corpus(const std::filesystem::path& path, CorpusFormat format) {
  const std::string content = read_file(path);
  return format == CorpusFormat::kCsv ? parse_corpus_csv(content, path.string())
                                      : parse_corpus_jsonl(content, path.string());
}

Corpus parse_corpus_jsonl(std::string_view content, std::string source) {
  std::vector<CorpusRecord> records;
  std::vector<std::size_t> rows;
  const auto lines = split_lines(content);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t row = ln + 1;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(row_label(row) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw SchemaError(row_label(row) + ": expected a JSON object");
    CorpusRecord rec;
    for (const auto& [key, value] : obj.items()) {
      std::optional<std::string> text;
      if (value.is_string()) {
        text = value.get<std::string>();
      } else if (!value.is_null()) {
        throw SchemaError(row_label(row) + ": field '" + key + "' must be a string");
      }
      if (!assign_field(rec, key, std::move(text), row)) {
        throw SchemaError(row_label(row) + ": unknown field '" + key + "'");
      }
    }
    for (auto column : kColumns) {
      if (column != "questions" && !obj.contains(std::string(column))) {
        throw SchemaError(row_label(row) + ": missing field '" + std::string(column) + "'");
      }
    }
    check_utf8(rec, row);
    records.push_back(std::move(rec));
    rows.push_back(row);
  }
  return build_corpus(std::move(records), rows, std::move(source));
}

Corpus parse_corpus_csv(std::string_view content, std::string source) {
  if (!uc::is_valid_utf8(content)) throw SchemaError(source + ": invalid UTF-8");
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  const auto table = parse_csv_rows(content);
  if (table.empty()) throw SchemaError(source + ": missing header row");
  const auto& header = table.front();
  for (const auto& name : header) {
    if (std::find(kColumns.begin(), kColumns.end(), name) == kColumns.end()) {
      throw SchemaError("header: unknown field '" + name + "'");
    }
  }
  for (auto column : kColumns) {
    if (column != "questions" &&
        std::find(header.begin(), header.end(), column) == header.end()) {
      throw SchemaError("header: missing field '" + std::string(column) + "'");
    }
  }
  std::vector<CorpusRecord> records;
  std::vector<std::size_t> rows;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& cells = table[r];
    if (cells.size() != header.size()) {
      throw SchemaError(row_label(r) + ": expected " + std::to_string(header.size()) +
                        " cells, found " + std::to_string(cells.size()));
    }
    CorpusRecord rec;
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::optional<std::string> value = cells[c];
      if (header[c] == "questions" && cells[c].empty()) value.reset();
      assign_field(rec, header[c], std::move(value), r);
    }
    records.push_back(std::move(rec));
    rows.push_back(r);
  }
  return build_corpus(std::move(records), rows, std::move(source));
}

std::string serialize_corpus_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records()) {
    Json j;
    j["id"] = r.id;
    j["unit_title"] = r.unit_title;
    j["lesson_title"] = r.lesson_title;
    j["section_content"] = r.section_content;
    j["questions"] = r.questions ? Json(*r.questions) : Json(nullptr);
    j["expert_summary"] = r.expert_summary;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::string serialize_corpus_csv(const Corpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) out.push_back(',');
    out += kColumns[i];
  }
  out.push_back('\n');
  for (const auto& r : corpus.records()) {
    out += csv_cell(r.id) + ',' + csv_cell(r.unit_title) + ',' + csv_cell(r.lesson_title) +
           ',' + csv_cell(r.section_content) + ',' + csv_cell(r.questions.value_or("")) +
           ',' + csv_cell(r.expert_summary) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

char32_t parse_codepoint(const Json& v) {
  if (v.is_number_unsigned() || v.is_number_integer()) {
    const auto cp = v.get<std::int64_t>();
    if (cp < 0 || cp > 0x10FFFF) throw ConfigError("codepoint out of range");
    return static_cast<char32_t>(cp);
  }
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.size() > 2 && (s[0] == 'U' || s[0] == 'u') && s[1] == '+') s = s.substr(2);
    std::size_t used = 0;
    unsigned long cp = 0;
    try {
      cp = std::stoul(s, &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || cp > 0x10FFFF) {
      throw ConfigError("bad codepoint '" + v.get<std::string>() + "'");
    }
    return static_cast<char32_t>(cp);
  }
  throw ConfigError("codepoints must be integers or \"U+XXXX\" strings");
}

std::string format_codepoint(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

// Whitespace controls survive removal; whitespace collapsing handles them.
std::string_view removable_class(char32_t cp, const CleaningConfig& config) {
  if (config.remove_classes.count("control") && uc::is_control(cp) && !uc::is_whitespace(cp)) {
    return "control";
  }
  if (config.remove_classes.count("zero_width") && uc::is_zero_width(cp)) return "zero_width";
  if (config.remove_classes.count("tatweel") && cp == uc::kTatweel) return "tatweel";
  if (config.extra_codepoints.count(cp)) return "extra";
  return {};
}

}  // namespace

CleaningConfig parse_cleaning_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("cleaning config must be a JSON object");
  CleaningConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "remove_classes") {
      if (!value.is_array()) throw ConfigError("remove_classes must be an array");
      c.remove_classes.clear();
      for (const auto& name : value) {
        const auto s = name.get<std::string>();
        if (s != "control" && s != "zero_width" && s != "tatweel") {
          throw ConfigError("unknown removable class '" + s + "'");
        }
        c.remove_classes.insert(s);
      }
    } else if (key == "extra_codepoints") {
      if (!value.is_array()) throw ConfigError("extra_codepoints must be an array");
      for (const auto& cp : value) c.extra_codepoints.insert(parse_codepoint(cp));
    } else if (key == "lowercase_latin") {
      c.lowercase_latin = value.get<bool>();
    } else {
      throw ConfigError("unknown cleaning config key '" + key + "'");
    }
  }
  for (char32_t cp : c.extra_codepoints) {
    if (uc::is_whitespace(cp)) {
      throw ConfigError("whitespace cannot be removable: " + format_codepoint(cp));
    }
  }
  return c;
}

Json to_json(const CleaningConfig& config) {
  Json extra = Json::array();
  for (char32_t cp : config.extra_codepoints) extra.push_back(format_codepoint(cp));
  return {{"remove_classes", config.remove_classes},
          {"extra_codepoints", extra},
          {"lowercase_latin", config.lowercase_latin}};
}

Json to_json(const CleaningReport& report) {
  return {{"records_in", report.records_in},
          {"records_out", report.records_out},
          {"records_dropped_empty", report.records_dropped_empty},
          {"chars_removed_by_class", report.chars_removed_by_class},
          {"fields_modified", report.fields_modified},
          {"dropped_ids", report.dropped_ids}};
}

std::string clean_text(std::string_view raw, const CleaningConfig& config) {
  std::map<std::string, std::size_t> ignored;
  return clean_text(raw, config, ignored);
}

std::string clean_text(std::string_view raw, const CleaningConfig& config,
                       std::map<std::string, std::size_t>& removed) {
  const std::u32string in = uc::decode_or_throw(raw, "clean_text");
  std::u32string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t cp : in) {
    if (auto cls = removable_class(cp, config); !cls.empty()) {
      ++removed[std::string(cls)];
      continue;
    }
    if (uc::is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(config.lowercase_latin ? uc::to_lower_latin(cp) : cp);
  }
  return uc::encode(out);
}

CleanedCorpus clean_corpus(const Corpus& corpus, const CleaningConfig& config) {
  CleaningReport report;
  report.records_in = corpus.size();
  std::vector<CorpusRecord> kept;
  kept.reserve(corpus.size());
  for (const auto& rec : corpus.records()) {
    CorpusRecord cleaned = rec;
    auto apply = [&](std::string& field) {
      std::string value = clean_text(field, config, report.chars_removed_by_class);
      if (value != field) ++report.fields_modified;
      field = std::move(value);
    };
    apply(cleaned.unit_title);
    apply(cleaned.lesson_title);
    apply(cleaned.section_content);
    apply(cleaned.expert_summary);
    if (cleaned.questions) {
      apply(*cleaned.questions);
      if (cleaned.questions->empty()) cleaned.questions.reset();
    }
    if (cleaned.section_content.empty() || cleaned.expert_summary.empty()) {
      ++report.records_dropped_empty;
      report.dropped_ids.push_back(rec.id);
      continue;
    }
    kept.push_back(std::move(cleaned));
  }
  report.records_out = kept.size();
  if (kept.empty()) {
    throw EmptyCorpusError("all " + std::to_string(report.records_in) +
                           " records are empty after cleaning");
  }
  return {Corpus(std::move(kept), corpus.provenance()), std::move(report)};
}

// ---------------------------------------------------------------------------

namespace {

const std::string* text_field(const CorpusRecord& rec, std::string_view field) {
  if (field == "unit_title") return &rec.unit_title;
  if (field == "lesson_title") return &rec.lesson_title;
  if (field == "section_content") return &rec.section_content;
  if (field == "expert_summary") return &rec.expert_summary;
  if (field == "questions") return rec.questions ? &*rec.questions : nullptr;
  throw UnknownFieldError("unknown text field '" + std::string(field) + "'");
}

}  // namespace

LengthProfile length_profile(const Corpus& corpus, std::string_view field,
                             std::size_t bucket_width) {
  if (field != "unit_title" && field != "lesson_title" && field != "section_content" &&
      field != "expert_summary" && field != "questions") {
    throw UnknownFieldError("unknown text field '" + std::string(field) + "'");
  }
  if (bucket_width == 0) throw ConfigError("bucket width must be positive");
  if (corpus.empty()) throw EmptyCorpusError("cannot profile an empty corpus");

  LengthProfile p;
  p.field = std::string(field);
  p.bucket_width = bucket_width;
  for (const auto& rec : corpus.records()) {
    const std::string* text = text_field(rec, field);
    p.word_counts.push_back(text ? tokenize_words(clean_text(*text)).size() : 0);
  }
  auto sorted = p.word_counts;
  std::sort(sorted.begin(), sorted.end());
  p.min = sorted.front();
  p.max = sorted.back();
  double sum = 0;
  for (auto c : sorted) sum += static_cast<double>(c);
  p.mean = sum / static_cast<double>(sorted.size());
  const std::size_t mid = sorted.size() / 2;
  p.median = sorted.size() % 2 ? static_cast<double>(sorted[mid])
                               : (static_cast<double>(sorted[mid - 1]) +
                                  static_cast<double>(sorted[mid])) / 2.0;
  const std::size_t n_buckets = p.max / bucket_width + 1;
  for (std::size_t b = 0; b < n_buckets; ++b) {
    p.buckets.push_back({b * bucket_width, (b + 1) * bucket_width, 0});
  }
  for (auto c : p.word_counts) ++p.buckets[c / bucket_width].count;
  return p;
}

Json to_json(const LengthProfile& p) {
  Json buckets = Json::array();
  for (const auto& b : p.buckets) {
    buckets.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
  }
  Json j;
  j["field"] = p.field;
  j["bucket_width"] = p.bucket_width;
  j["record_count"] = p.word_counts.size();
  j["min"] = p.min;
  j["max"] = p.max;
  j["mean"] = p.mean;
  j["median"] = p.median;
  j["word_counts"] = p.word_counts;
  j["buckets"] = buckets;
  return j;
}

std::string render_histogram(const LengthProfile& p) {
  std::size_t peak = 1;
  for (const auto& b : p.buckets) peak = std::max(peak, b.count);
  std::ostringstream out;
  out << "word count of " << p.field << " (" << p.word_counts.size() << " records)\n";
  for (const auto& b : p.buckets) {
    char range[64];
    std::snprintf(range, sizeof range, "[%6zu, %6zu)", b.lower, b.upper);
    const std::size_t bar = (b.count * 40 + peak - 1) / peak;
    out << range << ' ' << std::string(bar, '#') << ' ' << b.count << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

Subset parse_subset(std::string_view name) {
  if (name == "train") return Subset::kTrain;
  if (name == "validation") return Subset::kValidation;
  if (name == "test") return Subset::kTest;
  throw ConfigError("unknown subset '" + std::string(name) + "'");
}

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::kTrain: return "train";
    case Subset::kValidation: return "validation";
    case Subset::kTest: return "test";
  }
  return "test";
}

const std::vector<std::string>& SplitAssignment::ids(Subset subset) const {
  switch (subset) {
    case Subset::kTrain: return train_ids;
    case Subset::kValidation: return validation_ids;
    case Subset::kTest: return test_ids;
  }
  return test_ids;
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.train = n * 7 / 10;
  const std::size_t rest = n - s.train;
  s.validation = (rest + 1) / 2;
  s.test = rest / 2;
  return s;
}

SplitAssignment split_corpus(const Corpus& corpus, std::uint64_t seed) {
  if (corpus.size() < 3) {
    throw CorpusTooSmallError("splitting needs at least 3 records, got " +
                              std::to_string(corpus.size()));
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(seed);
  shuffle(std::span<std::size_t>(order), rng);

  const auto sizes = split_sizes(corpus.size());
  auto take = [&](std::size_t from, std::size_t count) {
    std::vector<std::size_t> picked(order.begin() + static_cast<std::ptrdiff_t>(from),
                                    order.begin() + static_cast<std::ptrdiff_t>(from + count));
    std::sort(picked.begin(), picked.end());
    std::vector<std::string> ids;
    for (auto i : picked) ids.push_back(corpus.records()[i].id);
    return ids;
  };
  SplitAssignment split;
  split.seed = seed;
  split.train_ids = take(0, sizes.train);
  split.validation_ids = take(sizes.train, sizes.validation);
  split.test_ids = take(sizes.train + sizes.validation, sizes.test);
  return split;
}

Json to_json(const SplitAssignment& split) {
  Json j;
  j["seed"] = split.seed;
  j["train"] = split.train_ids;
  j["validation"] = split.validation_ids;
  j["test"] = split.test_ids;
  return j;
}

SplitAssignment parse_split(const Json& j) {
  if (!j.is_object()) throw SchemaError("split file must be a JSON object");
  SplitAssignment s;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "train") s.train_ids = value.get<std::vector<std::string>>();
      else if (key == "validation") s.validation_ids = value.get<std::vector<std::string>>();
      else if (key == "test") s.test_ids = value.get<std::vector<std::string>>();
      else throw SchemaError("split file: unknown field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("split file: ") + e.what());
  }
  for (auto name : {"seed", "train", "validation", "test"}) {
    if (!j.contains(name)) throw SchemaError(std::string("split file: missing field '") + name + "'");
  }
  std::set<std::string> seen;
  for (const auto* list : {&s.train_ids, &s.validation_ids, &s.test_ids}) {
    for (const auto& id : *list) {
      if (!seen.insert(id).second) throw DuplicateIdError("split file: id '" + id + "' repeated");
    }
  }
  return s;
}

SplitAssignment read_split(const std::filesystem::path& path) {
  const auto content = read_file(path);
  try {
    return parse_split(Json::parse(content));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace arsum

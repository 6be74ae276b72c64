#include "arsum/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>

#include "arsum/baseline.hpp"
#include "arsum/candidates.hpp"
#include "arsum/corpus.hpp"
#include "arsum/error.hpp"
#include "arsum/io.hpp"
#include "arsum/rater.hpp"
#include "arsum/rater_http.hpp"
#include "arsum/report.hpp"
#include "arsum/rouge.hpp"

namespace fs = std::filesystem;

namespace arsum {

namespace {

using namespace rater;

// A run's record of what it read, how it was configured and what it wrote.
// Paths are stored as given so two runs from different directories with the
// same relative layout produce identical manifests.
struct RunManifest {
  std::string subcommand;
  Json config = Json::object();
  Json inputs = Json::object();
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
};

class Run {
 public:
  Run(std::string subcommand, fs::path out_dir) : out_dir_(std::move(out_dir)) {
    manifest_.subcommand = std::move(subcommand);
  }

  void input(const std::string& role, const fs::path& path) {
    inputs_.push_back(path);
    manifest_.inputs[role] = path.generic_string();
  }
  void inputs(const std::string& role, const std::vector<std::string>& paths) {
    Json list = Json::array();
    for (const auto& p : paths) {
      inputs_.emplace_back(p);
      list.push_back(fs::path(p).generic_string());
    }
    manifest_.inputs[role] = std::move(list);
  }
  Json& config() { return manifest_.config; }
  void seed(std::uint64_t s) { manifest_.seed = s; }

  // Refuses to clobber an input, then writes atomically.
  void emit(const std::string& name, std::string_view content) {
    const fs::path path = out_dir_ / name;
    for (const auto& in : inputs_) {
      std::error_code ec;
      if (fs::exists(path, ec) && fs::equivalent(path, in, ec)) {
        throw ConfigError("refusing to overwrite input " + in.string());
      }
    }
    write_file(path, content);
    manifest_.outputs.push_back(path.generic_string());
  }

  void finish() {
    Json j;
    j["subcommand"] = manifest_.subcommand;
    j["tool_version"] = std::string(kToolVersion);
    j["timestamp"] = utc_timestamp();
    j["seed"] = manifest_.seed ? Json(*manifest_.seed) : Json(nullptr);
    j["config"] = manifest_.config;
    j["inputs"] = manifest_.inputs;
    j["outputs"] = manifest_.outputs;
    write_file(out_dir_ / ("manifest." + manifest_.subcommand + ".json"), j.dump(2) + "\n");
  }

 private:
  fs::path out_dir_;
  RunManifest manifest_;
  std::vector<fs::path> inputs_;
};

Json parse_json_file(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": malformed JSON: " + e.what());
  }
}

Corpus load_corpus(const std::string& path, const std::string& format) {
  CorpusFormat f;
  if (format == "auto") f = format_from_path(path);
  else if (format == "jsonl") f = CorpusFormat::kJsonl;
  else if (format == "csv") f = CorpusFormat::kCsv;
  else throw ConfigError("unknown corpus format '" + format + "'");
  return parse_corpus(path, f);
}

// A profile is a preset name or a JSON file of NormalizationConfig fields.
NormalizationConfig load_profile(const std::string& spec) {
  if (fs::is_regular_file(spec)) {
    try {
      return parse_json_file(spec).get<NormalizationConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(spec + ": " + e.what());
    }
  }
  return NormalizationConfig::named(spec);
}

CleaningConfig load_cleaning(const std::string& path) {
  if (path.empty()) return {};
  return parse_cleaning_config(parse_json_file(path));
}

std::vector<CandidateSet> load_candidates(const std::vector<std::string>& paths) {
  std::vector<CandidateSet> sets;
  for (const auto& p : paths) sets.push_back(parse_candidates(p));
  return sets;
}

TokenKey parse_token_key(const std::string& hex) {
  if (hex.size() != 64) throw ConfigError("--token-key must be 64 hex digits");
  TokenKey key{};
  for (std::size_t i = 0; i < key.size(); ++i) {
    unsigned value = 0;
    for (char c : hex.substr(2 * i, 2)) {
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<unsigned>(c - 'A' + 10);
      else throw ConfigError("--token-key must be 64 hex digits");
    }
    key[i] = static_cast<unsigned char>(value);
  }
  return key;
}

// File-name-safe form of a record id.
std::string safe_name(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

// ---------------------------------------------------------------------------
// Option bags, one per subcommand.

struct CorpusOpts {
  std::string corpus;
  std::string format = "auto";
};

void add_corpus_opts(CLI::App* cmd, CorpusOpts& o) {
  cmd->add_option("--corpus", o.corpus, "Corpus file (.jsonl or .csv)")->required();
  cmd->add_option("--format", o.format, "Corpus format")
      ->check(CLI::IsMember({"auto", "jsonl", "csv"}))
      ->capture_default_str();
}

struct SplitOpts {
  std::string split;
  std::string subset = "test";
};

struct Options {
  std::string out;
  CorpusOpts corpus;
  SplitOpts split;
  std::uint64_t seed = 42;
  std::string profile = "paper-default";
  std::string cleaning;
  std::vector<std::string> candidates;
  bool force = false;

  // stats
  std::string field = "section_content";
  std::size_t bucket_width = 50;
  // baseline
  std::size_t word_budget = 256;
  std::size_t min_sentence_words = 1;
  // rouge
  bool include_lsum = false;
  // compare
  std::string id;
  std::string report_format = "md";
  // session / serve / expert-report
  std::string token_key;
  std::string session;
  std::string ratings;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::string admin_token;
};

const std::vector<std::string>& subset_ids(const SplitAssignment& split, const std::string& subset) {
  return split.ids(parse_subset(subset));
}

// ---------------------------------------------------------------------------

int run_validate(const Options& o, std::ostream& out) {
  const Corpus corpus = load_corpus(o.corpus.corpus, o.corpus.format);
  for (const auto& path : o.candidates) {
    const CandidateSet set = parse_candidates(path);
    const AlignmentReport report = align(set, corpus.ids());
    if (!report.extra_ids.empty()) {
      throw UnknownIdError(path + ": " + std::to_string(report.extra_ids.size()) +
                           " ids not in the corpus, first '" + report.extra_ids.front() + "'");
    }
    out << path << ": " << set.size() << " summaries from " << set.model_name() << ", valid\n";
  }
  out << o.corpus.corpus << ": " << corpus.size() << " records, valid\n";
  return 0;
}

int run_clean(const Options& o, std::ostream& out) {
  Run run("clean", o.out);
  run.input("corpus", o.corpus.corpus);
  if (!o.cleaning.empty()) run.input("cleaning_config", o.cleaning);
  const CleaningConfig config = load_cleaning(o.cleaning);
  run.config()["cleaning"] = to_json(config);

  const Corpus corpus = load_corpus(o.corpus.corpus, o.corpus.format);
  const CleanedCorpus cleaned = clean_corpus(corpus, config);
  run.emit("corpus.clean.jsonl", serialize_corpus_jsonl(cleaned.corpus));
  run.emit("cleaning_report.json", to_json(cleaned.report).dump(2) + "\n");
  run.finish();
  out << cleaned.report.records_out << " of " << cleaned.report.records_in << " records kept\n";
  return 0;
}

int run_stats(const Options& o, std::ostream& out) {
  Run run("stats", o.out);
  run.input("corpus", o.corpus.corpus);
  run.config()["field"] = o.field;
  run.config()["bucket_width"] = o.bucket_width;

  const LengthProfile profile =
      length_profile(load_corpus(o.corpus.corpus, o.corpus.format), o.field, o.bucket_width);
  const std::string histogram = render_histogram(profile);
  run.emit("stats." + o.field + ".json", to_json(profile).dump(2) + "\n");
  run.emit("stats." + o.field + ".txt", histogram);
  run.finish();
  out << histogram;
  return 0;
}

int run_split(const Options& o, std::ostream& out) {
  Run run("split", o.out);
  run.input("corpus", o.corpus.corpus);
  run.seed(o.seed);

  const SplitAssignment split = split_corpus(load_corpus(o.corpus.corpus, o.corpus.format), o.seed);
  run.emit("split.json", to_json(split).dump(2) + "\n");
  run.finish();
  out << "train " << split.train_ids.size() << ", validation " << split.validation_ids.size()
      << ", test " << split.test_ids.size() << '\n';
  return 0;
}

int run_baseline(const Options& o, std::ostream& out) {
  Run run("baseline", o.out);
  run.input("corpus", o.corpus.corpus);

  ExtractiveConfig config;
  config.word_budget = o.word_budget;
  config.min_sentence_words = o.min_sentence_words;
  config.normalization = load_profile(o.profile);
  config.validate();
  run.config()["word_budget"] = config.word_budget;
  run.config()["min_sentence_words"] = config.min_sentence_words;
  run.config()["normalization"] = config.normalization;

  const Corpus corpus = load_corpus(o.corpus.corpus, o.corpus.format);
  std::vector<std::string> ids;
  if (!o.split.split.empty()) {
    run.input("split", o.split.split);
    const SplitAssignment split = read_split(o.split.split);
    run.seed(split.seed);
    run.config()["subset"] = o.split.subset;
    ids = subset_ids(split, o.split.subset);
  }
  const CandidateSet set = summarize_corpus(corpus, ids, config);
  run.emit("candidates." + std::string(kBaselineModelName) + ".jsonl", serialize_candidates(set));
  run.finish();
  out << set.size() << " summaries written\n";
  return 0;
}

int run_rouge(const Options& o, std::ostream& out, std::ostream& err) {
  Run run("rouge", o.out);
  run.input("corpus", o.corpus.corpus);
  run.inputs("candidates", o.candidates);
  run.input("split", o.split.split);

  const NormalizationConfig normalization = load_profile(o.profile);
  ScoreOptions options;
  options.force = o.force;
  options.cleaning = load_cleaning(o.cleaning);
  if (!o.cleaning.empty()) run.input("cleaning_config", o.cleaning);
  run.config()["normalization"] = normalization;
  run.config()["cleaning"] = to_json(options.cleaning);
  run.config()["subset"] = o.split.subset;
  run.config()["force"] = o.force;
  run.config()["include_lsum"] = o.include_lsum;

  const Corpus corpus = load_corpus(o.corpus.corpus, o.corpus.format);
  const SplitAssignment split = read_split(o.split.split);
  run.seed(split.seed);
  const auto& ids = subset_ids(split, o.split.subset);

  std::vector<CorpusRougeSummary> summaries;
  std::string records;
  for (const auto& set : load_candidates(o.candidates)) {
    CorpusRougeSummary summary = score_set(corpus, set, ids, normalization, options);
    summary.subset = o.split.subset;
    summary.seed = split.seed;
    for (const auto& id : summary.forced_missing_ids) {
      err << "warning: " << set.model_name() << " has no summary for '" << id
          << "', scored as empty\n";
    }
    for (const auto& pair : score_records(corpus, set, ids, normalization, options)) {
      Json j = to_json(pair);
      j["model_name"] = set.model_name();
      records += j.dump() + "\n";
    }
    summaries.push_back(std::move(summary));
  }
  const RougeTable table = build_rouge_table(summaries, o.include_lsum);
  for (auto format : {ReportFormat::kJson, ReportFormat::kCsv, ReportFormat::kMarkdown}) {
    run.emit("report.rouge." + std::string(extension(format)), render(table, format));
  }
  run.emit("rouge.records.jsonl", records);
  run.finish();
  out << render(table, ReportFormat::kMarkdown);
  return 0;
}

int run_compare(const Options& o, std::ostream& out) {
  Run run("compare", o.out);
  run.input("corpus", o.corpus.corpus);
  run.inputs("candidates", o.candidates);
  run.config()["id"] = o.id;
  run.config()["format"] = o.report_format;

  const ReportFormat format = parse_report_format(o.report_format);
  const ComparisonSheet sheet =
      build_comparison(load_corpus(o.corpus.corpus, o.corpus.format), load_candidates(o.candidates), o.id);
  const std::string name = "comparison." + safe_name(o.id) + "." + std::string(extension(format));
  run.emit(name, render(sheet, format));
  run.finish();
  out << name << '\n';
  return 0;
}

int run_session(const Options& o, std::ostream& out) {
  Run run("session", o.out);
  run.input("corpus", o.corpus.corpus);
  run.inputs("candidates", o.candidates);
  run.input("split", o.split.split);
  run.seed(o.seed);
  run.config()["subset"] = o.split.subset;
  run.config()["force"] = o.force;
  // The key itself is a secret and stays out of the manifest.
  run.config()["token_key"] = o.token_key.empty() ? "random" : "supplied";

  SessionOptions options;
  options.force = o.force;
  if (!o.token_key.empty()) options.token_key = parse_token_key(o.token_key);

  const Corpus corpus = load_corpus(o.corpus.corpus, o.corpus.format);
  const SplitAssignment split = read_split(o.split.split);
  const Session session =
      create_session(corpus, load_candidates(o.candidates), subset_ids(split, o.split.subset), o.seed, options);
  run.emit("session.json", to_json(session).dump(2) + "\n");
  run.finish();
  out << session.tasks().size() << " tasks\n";
  return 0;
}

int run_serve(const Options& o, std::ostream& out) {
  const Session session = read_session(o.session);
  RatingStore store(session, o.ratings);
  ServiceConfig config;
  config.admin_token = o.admin_token;
  RaterService service(store, config);

  HttpOptions http;
  http.host = o.host;
  http.port = o.port;
  http.static_dir = o.static_dir;
  HttpServer server(service, http);

  // Block the stop signals here so the server thread inherits the mask and
  // sigwait below is the only receiver.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const int port = server.start();
  out << "serving " << session.tasks().size() << " tasks on http://" << o.host << ":" << port
      << " (" << store.size() << " ratings replayed)" << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  out << "stopped, " << store.size() << " ratings stored\n";
  return 0;
}

int run_expert_report(const Options& o, std::ostream& out) {
  Run run("expert-report", o.out);
  run.input("session", o.session);
  run.input("ratings", o.ratings);

  const Session session = read_session(o.session);
  RatingStore store(session);
  for (auto& rating : read_rating_log(o.ratings)) store.submit(std::move(rating));
  const auto aggregates = aggregate(store);
  const ExpertTable table = build_expert_table(to_expert_rows(aggregates));

  for (auto format : {ReportFormat::kJson, ReportFormat::kCsv, ReportFormat::kMarkdown}) {
    run.emit("report.expert." + std::string(extension(format)), render(table, format));
  }
  Json detail = Json::array();
  for (const auto& a : aggregates) detail.push_back(to_json(a));
  run.emit("expert.aggregates.json", detail.dump(2) + "\n");
  run.finish();
  out << render(table, ReportFormat::kMarkdown);
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arabic educational summarization toolkit: corpus preparation, extractive "
               "baseline, ROUGE scoring, reports and blind expert rating."};
  app.name("arsum");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Options o;
  auto out_opt = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--out", o.out, "Output directory");
    if (required) opt->required();
  };
  auto split_opts = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--split", o.split.split, "split.json from the split subcommand");
    if (required) opt->required();
    cmd->add_option("--subset", o.split.subset, "Subset of the split to use")
        ->check(CLI::IsMember({"train", "validation", "test"}))
        ->capture_default_str();
  };
  auto profile_opt = [&](CLI::App* cmd) {
    cmd->add_option("--profile", o.profile,
                    "Normalization profile: paper-default, raw, aggressive, or a JSON file")
        ->capture_default_str();
  };
  auto candidates_opt = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--candidates", o.candidates, "Candidate JSONL file (repeatable)");
    if (required) opt->required();
  };

  auto* validate = app.add_subcommand("validate", "Parse and schema-check a corpus");
  add_corpus_opts(validate, o.corpus);
  candidates_opt(validate, false);

  auto* clean = app.add_subcommand("clean", "Write the cleaned corpus and a cleaning report");
  add_corpus_opts(clean, o.corpus);
  clean->add_option("--cleaning", o.cleaning, "Cleaning config JSON")->check(CLI::ExistingFile);
  out_opt(clean);

  auto* stats = app.add_subcommand("stats", "Word-length profile of one field");
  add_corpus_opts(stats, o.corpus);
  stats->add_option("--field", o.field, "Field to profile")->capture_default_str();
  stats->add_option("--bucket-width", o.bucket_width, "Histogram bucket width in words")
      ->capture_default_str();
  out_opt(stats);

  auto* split = app.add_subcommand("split", "Seeded train/validation/test split");
  add_corpus_opts(split, o.corpus);
  split->add_option("--seed", o.seed, "Shuffle seed")->capture_default_str();
  out_opt(split);

  auto* baseline = app.add_subcommand("baseline", "Extractive baseline summaries");
  add_corpus_opts(baseline, o.corpus);
  split_opts(baseline, false);
  profile_opt(baseline);
  baseline->add_option("--word-budget", o.word_budget, "Maximum summary length in words")
      ->capture_default_str();
  baseline->add_option("--min-sentence-words", o.min_sentence_words,
                       "Sentences shorter than this score 0")
      ->capture_default_str();
  out_opt(baseline);

  auto* rouge = app.add_subcommand("rouge", "Score candidate sets on a split subset");
  add_corpus_opts(rouge, o.corpus);
  candidates_opt(rouge, true);
  split_opts(rouge, true);
  profile_opt(rouge);
  rouge->add_option("--cleaning", o.cleaning, "Cleaning config JSON applied before scoring")
      ->check(CLI::ExistingFile);
  rouge->add_flag("--force", o.force, "Score missing candidates as empty instead of failing");
  rouge->add_flag("--include-lsum", o.include_lsum, "Add a rougeLsum column to the table");
  out_opt(rouge);

  auto* compare = app.add_subcommand("compare", "Side-by-side sheet for one record");
  add_corpus_opts(compare, o.corpus);
  candidates_opt(compare, false);
  compare->add_option("--id", o.id, "Record id")->required();
  compare->add_option("--report-format", o.report_format, "md, csv or json")
      ->check(CLI::IsMember({"md", "csv", "json"}))
      ->capture_default_str();
  out_opt(compare);

  auto* session = app.add_subcommand("session", "Create a blind rating session manifest");
  add_corpus_opts(session, o.corpus);
  candidates_opt(session, true);
  split_opts(session, true);
  session->add_option("--seed", o.seed, "Label and order seed")->capture_default_str();
  session->add_option("--token-key", o.token_key,
                      "64 hex digits keying task ids; random when omitted");
  session->add_flag("--force", o.force, "Skip (record, model) pairs without a summary");
  out_opt(session);

  auto* serve = app.add_subcommand("serve", "Run the rating service");
  serve->add_option("--session", o.session, "Session manifest")
      ->envname("ARSUM_SESSION_MANIFEST")
      ->required();
  serve->add_option("--ratings-log", o.ratings, "Append-only rating log")
      ->envname("ARSUM_RATINGS_LOG")
      ->required();
  serve->add_option("--host", o.host, "Listen address")->capture_default_str();
  serve->add_option("--port", o.port, "Listen port, 0 for any free port")
      ->envname("ARSUM_PORT")
      ->capture_default_str();
  serve->add_option("--static-dir", o.static_dir, "Rater UI assets")->envname("ARSUM_STATIC_DIR");
  serve->add_option("--admin-token", o.admin_token, "Unlocks aggregates while the session is open")
      ->envname("ARSUM_ADMIN_TOKEN");

  auto* expert = app.add_subcommand("expert-report", "Aggregate a rating log into expert tables");
  expert->add_option("--session", o.session, "Session manifest")->required();
  expert->add_option("--ratings", o.ratings, "Rating log")->required();
  out_opt(expert);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*validate) return run_validate(o, out);
    if (*clean) return run_clean(o, out);
    if (*stats) return run_stats(o, out);
    if (*split) return run_split(o, out);
    if (*baseline) return run_baseline(o, out);
    if (*rouge) return run_rouge(o, out, err);
    if (*compare) return run_compare(o, out);
    if (*session) return run_session(o, out);
    if (*serve) return run_serve(o, out);
    if (*expert) return run_expert_report(o, out);
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "SchemaError: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "IoError: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace arsum

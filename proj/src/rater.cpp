#include "arsum/rater.hpp"

#include <fcntl.h>
#include <sodium.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>

#include "arsum/error.hpp"
#include "arsum/io.hpp"
#include "arsum/prng.hpp"

namespace arsum::rater {

namespace {

std::string hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

void ensure_sodium() {
  if (sodium_init() < 0) throw ConfigError("libsodium failed to initialize");
}

std::string make_task_id(const TokenKey& key, std::uint64_t seed, std::string_view record_id,
                         std::string_view model) {
  std::string message;
  for (int i = 0; i < 8; ++i) message.push_back(static_cast<char>((seed >> (8 * i)) & 0xFF));
  message.append(record_id);
  message.push_back('\0');
  message.append(model);
  unsigned char digest[16];
  crypto_generichash(digest, sizeof digest, reinterpret_cast<const unsigned char*>(message.data()),
                     message.size(), key.data(), key.size());
  return hex(digest, sizeof digest);
}

std::string label_for(std::size_t index) {
  if (index < 26) return std::string("System ") + static_cast<char>('A' + index);
  return "System " + std::to_string(index + 1);
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Json blind_payload(const RatingTask& task) {
  Json j;
  j["task_id"] = task.task_id;
  j["record_id"] = task.record_id;
  j["blind_label"] = task.blind_label;
  j["original_text"] = task.original_text;
  j["expert_summary"] = task.expert_summary;
  j["candidate_summary"] = task.candidate_summary;
  return j;
}

Session::Session(std::uint64_t seed, std::vector<RatingTask> tasks)
    : seed_(seed), tasks_(std::move(tasks)) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!index_.emplace(tasks_[i].task_id, i).second) {
      throw DuplicateIdError("task id '" + tasks_[i].task_id + "' repeated");
    }
  }
}

const RatingTask* Session::find(std::string_view task_id) const {
  auto it = index_.find(std::string(task_id));
  return it == index_.end() ? nullptr : &tasks_[it->second];
}

std::vector<std::string> Session::model_names() const {
  std::set<std::string> names;
  for (const auto& t : tasks_) names.insert(t.model_name);
  return {names.begin(), names.end()};
}

Session create_session(const Corpus& corpus, const std::vector<CandidateSet>& candidate_sets,
                       const std::vector<std::string>& ids, std::uint64_t seed,
                       const SessionOptions& options) {
  ensure_sodium();
  TokenKey key{};
  if (options.token_key) key = *options.token_key;
  else randombytes_buf(key.data(), key.size());

  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!corpus.contains(id)) throw MissingRecordError("id '" + id + "' is not in the corpus");
    for (const auto& set : candidate_sets) {
      if (!set.contains(id)) missing.push_back(set.model_name() + "/" + id);
    }
  }
  if (!missing.empty() && !options.force) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingCandidateError("no summary for: " + list);
  }

  // Every label must be free of every model name, or the blinding leaks.
  for (std::size_t i = 0; i < candidate_sets.size(); ++i) {
    const auto label = lower_ascii(label_for(i));
    for (const auto& set : candidate_sets) {
      if (label.find(lower_ascii(set.model_name())) != std::string::npos) {
        throw BlindnessError("model name '" + set.model_name() + "' occurs in label '" +
                             label_for(i) + "'");
      }
    }
  }

  SplitMix64 rng(seed);
  std::vector<RatingTask> tasks;
  for (const auto& id : ids) {
    const CorpusRecord& rec = *corpus.find(id);
    std::vector<const CandidateSet*> present;
    for (const auto& set : candidate_sets) {
      if (set.contains(id)) present.push_back(&set);
    }
    shuffle(std::span<const CandidateSet*>(present), rng);
    for (std::size_t k = 0; k < present.size(); ++k) {
      RatingTask t;
      t.task_id = make_task_id(key, seed, id, present[k]->model_name());
      t.record_id = id;
      t.original_text = rec.section_content;
      t.expert_summary = rec.expert_summary;
      t.candidate_summary = *present[k]->find(id);
      t.blind_label = label_for(k);
      t.model_name = present[k]->model_name();
      tasks.push_back(std::move(t));
    }
  }
  shuffle(std::span<RatingTask>(tasks), rng);
  return Session(seed, std::move(tasks));
}

Json to_json(const Session& session) {
  Json tasks = Json::array();
  for (const auto& t : session.tasks()) {
    Json j = blind_payload(t);
    j["model_name"] = t.model_name;
    tasks.push_back(std::move(j));
  }
  Json j;
  j["seed"] = session.seed();
  j["tasks"] = std::move(tasks);
  return j;
}

Session session_from_json(const Json& j) {
  try {
    std::vector<RatingTask> tasks;
    for (const auto& t : j.at("tasks")) {
      tasks.push_back({t.at("task_id").get<std::string>(), t.at("record_id").get<std::string>(),
                       t.at("original_text").get<std::string>(),
                       t.at("expert_summary").get<std::string>(),
                       t.at("candidate_summary").get<std::string>(),
                       t.at("blind_label").get<std::string>(),
                       t.at("model_name").get<std::string>()});
    }
    return Session(j.at("seed").get<std::uint64_t>(), std::move(tasks));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("session manifest: ") + e.what());
  }
}

Session read_session(const std::filesystem::path& path) {
  try {
    return session_from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": malformed JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

int score_field(const Json& j, const char* name) {
  const auto& v = j.at(name);
  if (!v.is_number_integer()) throw SchemaError(std::string("'") + name + "' must be an integer");
  const auto value = v.get<long long>();
  if (value < 1 || value > 10) {
    throw OutOfRangeError(std::string("'") + name + "' must be in 1..10, got " +
                          std::to_string(value));
  }
  return static_cast<int>(value);
}

void check_range(const char* name, int value) {
  if (value < 1 || value > 10) {
    throw OutOfRangeError(std::string("'") + name + "' must be in 1..10, got " +
                          std::to_string(value));
  }
}

}  // namespace

Rating rating_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("rating must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "task_id" && key != "overall" && key != "criteria" && key != "rater_id" &&
        key != "timestamp") {
      throw SchemaError("unknown rating field '" + key + "'");
    }
  }
  for (auto name : {"task_id", "overall", "rater_id"}) {
    if (!j.contains(name)) throw SchemaError(std::string("missing rating field '") + name + "'");
  }
  Rating r;
  if (!j.at("task_id").is_string()) throw SchemaError("'task_id' must be a string");
  if (!j.at("rater_id").is_string()) throw SchemaError("'rater_id' must be a string");
  r.task_id = j.at("task_id").get<std::string>();
  r.rater_id = j.at("rater_id").get<std::string>();
  if (r.rater_id.empty()) throw SchemaError("'rater_id' is empty");
  r.overall = score_field(j, "overall");
  if (j.contains("criteria") && !j.at("criteria").is_null()) {
    const auto& c = j.at("criteria");
    if (!c.is_object()) throw SchemaError("'criteria' must be an object");
    for (const auto& [key, value] : c.items()) {
      if (value.is_null()) continue;
      if (key == "coherence") r.criteria.coherence = score_field(c, "coherence");
      else if (key == "informativeness") r.criteria.informativeness = score_field(c, "informativeness");
      else if (key == "relevance") r.criteria.relevance = score_field(c, "relevance");
      else throw SchemaError("unknown criterion '" + key + "'");
    }
  }
  if (j.contains("timestamp")) {
    if (!j.at("timestamp").is_string()) throw SchemaError("'timestamp' must be a string");
    r.timestamp = j.at("timestamp").get<std::string>();
  }
  return r;
}

Json to_json(const Rating& rating) {
  Json j;
  j["task_id"] = rating.task_id;
  j["overall"] = rating.overall;
  Json criteria = Json::object();
  if (rating.criteria.coherence) criteria["coherence"] = *rating.criteria.coherence;
  if (rating.criteria.informativeness) criteria["informativeness"] = *rating.criteria.informativeness;
  if (rating.criteria.relevance) criteria["relevance"] = *rating.criteria.relevance;
  if (!criteria.empty()) j["criteria"] = std::move(criteria);
  j["rater_id"] = rating.rater_id;
  j["timestamp"] = rating.timestamp;
  return j;
}

std::vector<Rating> read_rating_log(const std::filesystem::path& path) {
  std::vector<Rating> out;
  if (!std::filesystem::exists(path)) return out;
  const auto content = read_file(path);
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      out.push_back(rating_from_json(Json::parse(lines[i])));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

RatingStore::RatingStore(const Session& session, std::filesystem::path log_path)
    : session_(session), log_path_(std::move(log_path)) {
  if (log_path_.empty()) return;
  for (auto& r : read_rating_log(log_path_)) {
    validate(r);
    rated_.emplace(r.task_id, r.rater_id);
    ratings_.push_back(std::move(r));
  }
  if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
  fd_ = ::open(log_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open rating log " + log_path_.string() + ": " + std::strerror(errno));
}

RatingStore::~RatingStore() {
  if (fd_ >= 0) ::close(fd_);
}

void RatingStore::validate(const Rating& r) const {
  if (!session_.find(r.task_id)) throw UnknownTaskError("unknown task '" + r.task_id + "'");
  if (r.rater_id.empty()) throw SchemaError("'rater_id' is empty");
  check_range("overall", r.overall);
  if (r.criteria.coherence) check_range("coherence", *r.criteria.coherence);
  if (r.criteria.informativeness) check_range("informativeness", *r.criteria.informativeness);
  if (r.criteria.relevance) check_range("relevance", *r.criteria.relevance);
  if (rated_.count({r.task_id, r.rater_id})) {
    throw DuplicateRatingError("rater '" + r.rater_id + "' already rated task '" + r.task_id + "'");
  }
}

void RatingStore::submit(Rating rating) {
  if (rating.timestamp.empty()) rating.timestamp = utc_timestamp();
  std::unique_lock lock(mutex_);
  validate(rating);
  if (fd_ >= 0) {
    const std::string line = to_json(rating).dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
      const auto n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw IoError("rating log write failed: " + std::string(std::strerror(errno)));
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw IoError("rating log fsync failed: " + std::string(std::strerror(errno)));
  }
  rated_.emplace(rating.task_id, rating.rater_id);
  ratings_.push_back(std::move(rating));
}

std::vector<Rating> RatingStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return ratings_;
}

std::size_t RatingStore::size() const {
  std::shared_lock lock(mutex_);
  return ratings_.size();
}

bool RatingStore::has_rated(std::string_view task_id, std::string_view rater_id) const {
  std::shared_lock lock(mutex_);
  return rated_.count({std::string(task_id), std::string(rater_id)}) > 0;
}

std::size_t RatingStore::rated_count(std::string_view rater_id) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [task, rater] : rated_) n += rater == rater_id;
  return n;
}

// ---------------------------------------------------------------------------

std::vector<ExpertAggregate> aggregate(const Session& session, const std::vector<Rating>& ratings) {
  if (ratings.empty()) throw EmptyStoreError("no ratings to aggregate");
  struct Acc {
    long long sum = 0;
    std::size_t count = 0;
    int min = 10, max = 1;
    std::map<std::string, std::pair<long long, std::size_t>> criteria;
  };
  std::map<std::string, Acc> by_model;
  for (const auto& r : ratings) {
    const RatingTask* task = session.find(r.task_id);
    if (!task) throw UnknownTaskError("rating refers to unknown task '" + r.task_id + "'");
    auto& acc = by_model[task->model_name];
    acc.sum += r.overall;
    ++acc.count;
    acc.min = std::min(acc.min, r.overall);
    acc.max = std::max(acc.max, r.overall);
    auto add = [&](const char* name, const std::optional<int>& v) {
      if (!v) return;
      auto& [s, c] = acc.criteria[name];
      s += *v;
      ++c;
    };
    add("coherence", r.criteria.coherence);
    add("informativeness", r.criteria.informativeness);
    add("relevance", r.criteria.relevance);
  }
  std::vector<ExpertAggregate> out;
  for (const auto& [model, acc] : by_model) {
    ExpertAggregate a;
    a.model_name = model;
    a.count = acc.count;
    a.mean = static_cast<double>(acc.sum) / static_cast<double>(acc.count);
    a.min = acc.min;
    a.max = acc.max;
    for (const auto& [name, sc] : acc.criteria) {
      a.criteria_means[name] = static_cast<double>(sc.first) / static_cast<double>(sc.second);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<ExpertAggregate> aggregate(const RatingStore& store) {
  return aggregate(store.session(), store.snapshot());
}

Json to_json(const ExpertAggregate& a) {
  Json j;
  j["model_name"] = a.model_name;
  j["mean"] = a.mean;
  j["mean_display"] = display(a.mean, 3);
  j["count"] = a.count;
  j["min"] = a.min;
  j["max"] = a.max;
  j["criteria_means"] = Json::object();
  for (const auto& [name, mean] : a.criteria_means) j["criteria_means"][name] = mean;
  return j;
}

std::vector<ExpertRow> to_expert_rows(const std::vector<ExpertAggregate>& aggregates) {
  std::vector<ExpertRow> rows;
  for (const auto& a : aggregates) rows.push_back({a.model_name, a.mean, a.count});
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

Response error(int status, const Error& e) {
  return {status, Json{{"error", e.kind()}, {"message", e.what()}}};
}

}  // namespace

RaterService::RaterService(RatingStore& store, ServiceConfig config)
    : store_(store), config_(std::move(config)) {}

bool RaterService::is_admin(std::string_view token) const {
  return !config_.admin_token.empty() && sodium_memcmp(token.data(), config_.admin_token.data(),
                                                       std::min(token.size(), config_.admin_token.size())) == 0 &&
         token.size() == config_.admin_token.size();
}

Response RaterService::session_info(std::string_view rater_id) const {
  Json j;
  j["task_count"] = store_.session().tasks().size();
  {
    std::lock_guard lock(config_mutex_);
    j["session_open"] = config_.session_open;
  }
  if (!rater_id.empty()) {
    j["rater_id"] = std::string(rater_id);
    j["rated"] = store_.rated_count(rater_id);
  }
  return {200, j};
}

Response RaterService::next_task(std::string_view rater_id) const {
  if (rater_id.empty()) return error(400, SchemaError("query parameter 'rater' is required"));
  const auto& tasks = store_.session().tasks();
  const std::size_t rated = store_.rated_count(rater_id);
  Json progress{{"rated", rated}, {"total", tasks.size()}};
  for (const auto& t : tasks) {
    if (store_.has_rated(t.task_id, rater_id)) continue;
    return {200, Json{{"done", false}, {"task", blind_payload(t)}, {"progress", progress}}};
  }
  return {200, Json{{"done", true}, {"progress", progress}}};
}

Response RaterService::post_rating(std::string_view body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return error(400, SchemaError("request body is not valid JSON"));
  }
  try {
    Rating r = rating_from_json(j);
    const std::string task_id = r.task_id;
    store_.submit(std::move(r));
    return {201, Json{{"status", "stored"}, {"task_id", task_id}}};
  } catch (const DuplicateRatingError& e) {
    return error(409, e);
  } catch (const UnknownTaskError& e) {
    return error(404, e);
  } catch (const OutOfRangeError& e) {
    return error(422, e);
  } catch (const SchemaError& e) {
    return error(422, e);
  } catch (const IoError& e) {
    return error(500, e);
  }
}

Response RaterService::aggregates(std::string_view admin_token) const {
  bool open = false;
  {
    std::lock_guard lock(config_mutex_);
    open = config_.session_open;
  }
  if (open && !is_admin(admin_token)) {
    return error(403, ConfigError("aggregates are admin-only while the session is open"));
  }
  try {
    Json list = Json::array();
    for (const auto& a : aggregate(store_)) list.push_back(to_json(a));
    return {200, Json{{"aggregates", list}}};
  } catch (const EmptyStoreError& e) {
    return error(409, e);
  }
}

Response RaterService::close_session(std::string_view admin_token) {
  if (!is_admin(admin_token)) return error(403, ConfigError("admin token required"));
  std::lock_guard lock(config_mutex_);
  config_.session_open = false;
  return {200, Json{{"session_open", false}}};
}

}  // namespace arsum::rater

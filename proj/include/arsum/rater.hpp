#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arsum/candidates.hpp"
#include "arsum/corpus.hpp"
#include "arsum/json.hpp"
#include "arsum/report.hpp"

namespace arsum::rater {

/// One (record, model) pair shown to an expert under an anonymous label.
struct RatingTask {
  std::string task_id;  // 128-bit keyed hash, hex
  std::string record_id;
  std::string original_text;
  std::string expert_summary;
  std::string candidate_summary;
  std::string blind_label;  // "System A", ...
  std::string model_name;   // server side only; never sent to raters

  bool operator==(const RatingTask&) const = default;
};

/// The fields a rating client may see.
Json blind_payload(const RatingTask& task);

using TokenKey = std::array<unsigned char, 32>;

struct SessionOptions {
  /// Keep going when a model lacks a summary for a record; that pair is skipped.
  bool force = false;
  /// Secret for task ids. Drawn from the OS when absent, so ids cannot be
  /// predicted from the seed.
  std::optional<TokenKey> token_key;
};

class Session {
 public:
  Session() = default;
  Session(std::uint64_t seed, std::vector<RatingTask> tasks);

  std::uint64_t seed() const { return seed_; }
  const std::vector<RatingTask>& tasks() const { return tasks_; }
  const RatingTask* find(std::string_view task_id) const;
  std::vector<std::string> model_names() const;

 private:
  std::uint64_t seed_ = 0;
  std::vector<RatingTask> tasks_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One task per (record, model). Labels are permuted per record and the task
/// order is shuffled, both from `seed`. Throws MissingCandidateError (unless
/// forced), MissingRecordError and BlindnessError.
Session create_session(const Corpus& corpus, const std::vector<CandidateSet>& candidate_sets,
                       const std::vector<std::string>& ids, std::uint64_t seed,
                       const SessionOptions& options = {});

/// The session manifest, including the task-to-model map.
Json to_json(const Session& session);
Session session_from_json(const Json& j);
Session read_session(const std::filesystem::path& path);

struct Criteria {
  std::optional<int> coherence;
  std::optional<int> informativeness;
  std::optional<int> relevance;

  bool operator==(const Criteria&) const = default;
};

struct Rating {
  std::string task_id;
  int overall = 0;
  Criteria criteria;
  std::string rater_id;
  std::string timestamp;

  bool operator==(const Rating&) const = default;
};

/// Throws SchemaError on malformed or missing fields and OutOfRangeError when
/// a score lies outside 1..10. A missing timestamp is left empty.
Rating rating_from_json(const Json& j);
Json to_json(const Rating& rating);

/// Append-only rating log bound to one session. Submissions are serialized
/// and acknowledged only after the line is flushed to disk; reads take a
/// snapshot.
class RatingStore {
 public:
  /// Replays `log_path` when it exists. An empty path keeps ratings in memory.
  RatingStore(const Session& session, std::filesystem::path log_path = {});
  ~RatingStore();

  RatingStore(const RatingStore&) = delete;
  RatingStore& operator=(const RatingStore&) = delete;

  /// Throws UnknownTaskError, OutOfRangeError, SchemaError, DuplicateRatingError, IoError.
  void submit(Rating rating);

  std::vector<Rating> snapshot() const;
  std::size_t size() const;
  bool has_rated(std::string_view task_id, std::string_view rater_id) const;
  std::size_t rated_count(std::string_view rater_id) const;
  const Session& session() const { return session_; }

 private:
  void validate(const Rating& rating) const;

  const Session& session_;
  std::filesystem::path log_path_;
  int fd_ = -1;
  mutable std::shared_mutex mutex_;
  std::vector<Rating> ratings_;
  std::set<std::pair<std::string, std::string>> rated_;  // (task, rater)
};

struct ExpertAggregate {
  std::string model_name;
  double mean = 0.0;
  std::size_t count = 0;
  int min = 0;
  int max = 0;
  std::map<std::string, double> criteria_means;  // only criteria that were given

  bool operator==(const ExpertAggregate&) const = default;
};

/// Mean overall rating per true model name, ordered by model name. Throws
/// EmptyStoreError.
std::vector<ExpertAggregate> aggregate(const Session& session, const std::vector<Rating>& ratings);
std::vector<ExpertAggregate> aggregate(const RatingStore& store);

Json to_json(const ExpertAggregate& aggregate);
std::vector<ExpertRow> to_expert_rows(const std::vector<ExpertAggregate>& aggregates);

/// Reads a rating log without a session (for offline reports).
std::vector<Rating> read_rating_log(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Request handling, independent of the transport.

struct Response {
  int status = 200;
  Json body;
};

struct ServiceConfig {
  /// Required to read aggregates while the session is open. Empty disables
  /// the admin override.
  std::string admin_token;
  bool session_open = true;
};

class RaterService {
 public:
  RaterService(RatingStore& store, ServiceConfig config);

  Response session_info(std::string_view rater_id) const;
  Response next_task(std::string_view rater_id) const;
  Response post_rating(std::string_view body);
  Response aggregates(std::string_view admin_token) const;
  Response close_session(std::string_view admin_token);

 private:
  bool is_admin(std::string_view token) const;

  RatingStore& store_;
  ServiceConfig config_;
  mutable std::mutex config_mutex_;
};

}  // namespace arsum::rater

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include "arsum/error.hpp"
#include "arsum/rater.hpp"
#include "arsum/rater_http.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace arsum;
using namespace arsum::rater;

namespace {

const std::vector<std::string> kModels = {"AraBART", "mBART50", "mt5"};

Corpus two_records() {
  return Corpus({{"r1", "u1", "l1", "الخلية وحدة البناء.", std::nullopt, "الخلية أساس الحياة."},
                 {"r2", "u1", "l2", "النواة تتحكم في الخلية.", std::nullopt, "النواة مركز التحكم."}});
}

std::vector<CandidateSet> three_sets() {
  std::vector<CandidateSet> sets;
  for (std::size_t i = 0; i < kModels.size(); ++i) {
    CandidateSet s(kModels[i]);
    s.add("r1", "ملخص أول رقم " + std::to_string(i));
    s.add("r2", "ملخص ثان رقم " + std::to_string(i));
    sets.push_back(std::move(s));
  }
  return sets;
}

TokenKey fixed_key(unsigned char fill = 7) {
  TokenKey k;
  k.fill(fill);
  return k;
}

Session make_session(std::uint64_t seed = 42) {
  SessionOptions opt;
  opt.token_key = fixed_key();
  return create_session(two_records(), three_sets(), {"r1", "r2"}, seed, opt);
}

Rating rating(const std::string& task, int overall, const std::string& rater = "e1") {
  Rating r;
  r.task_id = task;
  r.overall = overall;
  r.rater_id = rater;
  r.timestamp = "2024-01-01T00:00:00Z";
  return r;
}

std::string post_body(const std::string& task, int overall, const std::string& rater = "e1") {
  return to_json(rating(task, overall, rater)).dump();
}

bool mentions_model(const std::string& text) {
  return std::any_of(kModels.begin(), kModels.end(),
                     [&](const std::string& m) { return text.find(m) != std::string::npos; });
}

}  // namespace

TEST_CASE("one task per record and model, labels permuted per record") {
  const Session s = make_session();
  REQUIRE(s.tasks().size() == 6);
  std::map<std::string, std::set<std::string>> labels, models;
  std::set<std::string> ids;
  for (const auto& t : s.tasks()) {
    labels[t.record_id].insert(t.blind_label);
    models[t.record_id].insert(t.model_name);
    ids.insert(t.task_id);
    CHECK(t.task_id.size() == 32);
  }
  CHECK(ids.size() == 6);
  for (const auto& rec : {"r1", "r2"}) {
    CHECK(labels[rec] == std::set<std::string>{"System A", "System B", "System C"});
    CHECK(models[rec].size() == 3);
  }
}

TEST_CASE("same seed and key give the same session; the key alone changes ids") {
  CHECK(make_session(42).tasks() == make_session(42).tasks());

  SessionOptions other;
  other.token_key = fixed_key(9);
  const auto s2 = create_session(two_records(), three_sets(), {"r1", "r2"}, 42, other);
  for (std::size_t i = 0; i < s2.tasks().size(); ++i) {
    CHECK(s2.tasks()[i].task_id != make_session(42).tasks()[i].task_id);
    CHECK(s2.tasks()[i].model_name == make_session(42).tasks()[i].model_name);
  }

  // Without a supplied key the ids are fresh every time.
  const auto r1 = create_session(two_records(), three_sets(), {"r1", "r2"}, 42);
  const auto r2 = create_session(two_records(), three_sets(), {"r1", "r2"}, 42);
  CHECK(r1.tasks()[0].task_id != r2.tasks()[0].task_id);
}

TEST_CASE("label assignment varies with the seed") {
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::string order;
    const Session s = make_session(seed);
    for (const auto& t : s.tasks()) {
      if (t.record_id == "r1") order += t.blind_label + "=" + t.model_name + ";";
    }
    seen.insert(order);
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("missing candidates") {
  auto sets = three_sets();
  CandidateSet partial("mt5");
  partial.add("r1", "x");
  sets[2] = partial;
  SessionOptions opt;
  opt.token_key = fixed_key();
  CHECK_THROWS_AS(create_session(two_records(), sets, {"r1", "r2"}, 1, opt), MissingCandidateError);
  opt.force = true;
  CHECK(create_session(two_records(), sets, {"r1", "r2"}, 1, opt).tasks().size() == 5);
  CHECK_THROWS_AS(create_session(two_records(), sets, {"zz"}, 1, opt), MissingRecordError);
}

TEST_CASE("a model name that would show through a label is refused") {
  std::vector<CandidateSet> sets{CandidateSet("System"), CandidateSet("other")};
  sets[0].add("r1", "x");
  sets[1].add("r1", "y");
  CHECK_THROWS_AS(create_session(two_records(), sets, {"r1"}, 1), BlindnessError);
}

TEST_CASE("blind payload never carries the model") {
  const Session s = make_session();
  for (const auto& t : s.tasks()) {
    const Json j = blind_payload(t);
    CHECK_FALSE(j.contains("model_name"));
    CHECK_FALSE(mentions_model(j.dump()));
  }
}

TEST_CASE("session manifest round-trips") {
  const Session s = make_session();
  const Session back = session_from_json(to_json(s));
  CHECK(back.seed() == s.seed());
  CHECK(back.tasks() == s.tasks());
  CHECK_THROWS_AS(session_from_json(Json::parse(R"({"seed":1})")), SchemaError);
}

TEST_CASE("rating validation") {
  const Session s = make_session();
  RatingStore store(s);
  const auto& tasks = s.tasks();
  store.submit(rating(tasks[0].task_id, 7));
  CHECK(store.size() == 1);
  CHECK_THROWS_AS(store.submit(rating(tasks[1].task_id, 11)), OutOfRangeError);
  CHECK_THROWS_AS(store.submit(rating(tasks[1].task_id, 0)), OutOfRangeError);
  CHECK_THROWS_AS(store.submit(rating(tasks[0].task_id, 5)), DuplicateRatingError);
  CHECK_THROWS_AS(store.submit(rating("feed", 5)), UnknownTaskError);
  // A second rater may rate the same task.
  store.submit(rating(tasks[0].task_id, 5, "e2"));
  CHECK(store.size() == 2);

  CHECK_THROWS_AS(rating_from_json(Json::parse(R"({"task_id":"x","overall":7.5,"rater_id":"e"})")), SchemaError);
  CHECK_THROWS_AS(rating_from_json(Json::parse(R"({"task_id":"x","overall":7,"rater_id":"e","model_name":"m"})")),
                  SchemaError);
  CHECK_THROWS_AS(rating_from_json(Json::parse(R"({"task_id":"x","overall":7,"rater_id":"e","criteria":{"coherence":12}})")),
                  OutOfRangeError);
  const Rating r = rating_from_json(
      Json::parse(R"({"task_id":"x","overall":7,"rater_id":"e","criteria":{"relevance":3}})"));
  CHECK(r.criteria.relevance == 3);
  CHECK(rating_from_json(to_json(r)) == r);
}

TEST_CASE("mean of 7, 8, 9 is 8.0") {
  const Session s = make_session();
  RatingStore store(s);
  const auto& t = s.tasks();
  const std::string model = t[0].model_name;
  int score = 7;
  for (const auto& raters : {"e1", "e2", "e3"}) store.submit(rating(t[0].task_id, score++, raters));
  const auto agg = aggregate(store);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].model_name == model);
  CHECK(agg[0].mean == 8.0);
  CHECK(agg[0].count == 3);
  CHECK(agg[0].min == 7);
  CHECK(agg[0].max == 9);
  CHECK(to_json(agg[0])["mean_display"] == "8.000");
}

TEST_CASE("22 ratings summing to 185 display as 8.409") {
  std::vector<RatingTask> tasks;
  for (int i = 0; i < 22; ++i) tasks.push_back({"t" + std::to_string(i), "r", "", "", "", "System A", "AraBART"});
  Session s(1, tasks);
  std::vector<Rating> ratings;
  // 9 nines and 13 eights: 81 + 104 = 185.
  for (int i = 0; i < 22; ++i) ratings.push_back(rating("t" + std::to_string(i), i < 9 ? 9 : 8));
  int sum = 0;
  for (const auto& r : ratings) sum += r.overall;
  REQUIRE(sum == 185);
  const auto agg = aggregate(s, ratings);
  CHECK(to_json(agg[0])["mean_display"] == "8.409");
  CHECK(render(build_expert_table(to_expert_rows(agg)), ReportFormat::kMarkdown).find("| AraBART | 8.409 |") !=
        std::string::npos);
}

TEST_CASE("aggregation matches the arithmetic-mean oracle on random logs") {
  oracle::Gen gen(71);
  for (int round = 0; round < 300; ++round) {
    std::vector<RatingTask> tasks;
    const std::size_t n_models = gen.size(1, 5);
    for (std::size_t i = gen.size(1, 40); i > 0; --i) {
      tasks.push_back({"t" + std::to_string(i), "r", "", "", "", "System A",
                       "m" + std::to_string(gen.size(0, n_models - 1))});
    }
    Session s(1, tasks);
    std::vector<Rating> ratings;
    std::map<std::string, std::vector<int>> by_model;
    for (const auto& t : tasks) {
      for (std::size_t r = gen.size(0, 3); r > 0; --r) {
        const int v = gen.integer(1, 10);
        ratings.push_back(rating(t.task_id, v, "e" + std::to_string(r)));
        by_model[t.model_name].push_back(v);
      }
    }
    if (ratings.empty()) {
      REQUIRE_THROWS_AS(aggregate(s, ratings), EmptyStoreError);
      continue;
    }
    const auto agg = aggregate(s, ratings);
    REQUIRE(agg.size() == by_model.size());
    auto it = by_model.begin();
    for (const auto& a : agg) {
      REQUIRE(a.model_name == it->first);
      REQUIRE(a.count == it->second.size());
      REQUIRE(a.mean == doctest::Approx(oracle::mean(it->second)).epsilon(1e-12));
      REQUIRE(a.min == *std::min_element(it->second.begin(), it->second.end()));
      REQUIRE(a.max == *std::max_element(it->second.begin(), it->second.end()));
      ++it;
    }
  }
}

TEST_CASE("the log survives a restart and replays to the same aggregates") {
  testing::TempDir dir;
  const Session s = make_session();
  const auto log = dir / "ratings.jsonl";
  std::vector<ExpertAggregate> before;
  {
    RatingStore store(s, log);
    int v = 3;
    for (const auto& t : s.tasks()) store.submit(rating(t.task_id, v++));
    before = aggregate(store);
  }
  RatingStore again(s, log);
  CHECK(again.size() == s.tasks().size());
  CHECK(aggregate(again) == before);
  CHECK(aggregate(s, read_rating_log(log)) == before);
  CHECK_THROWS_AS(again.submit(rating(s.tasks()[0].task_id, 4)), DuplicateRatingError);

  testing::spit(dir / "bad.jsonl", "{\"task_id\":\"nope\",\"overall\":5,\"rater_id\":\"e\"}\n");
  CHECK_THROWS_AS(RatingStore(s, dir / "bad.jsonl"), UnknownTaskError);
}

TEST_CASE("concurrent submissions are all stored exactly once") {
  testing::TempDir dir;
  const Session s = make_session();
  RatingStore store(s, dir / "log.jsonl");
  std::vector<std::thread> threads;
  for (int k = 0; k < 8; ++k) {
    threads.emplace_back([&, k] {
      for (const auto& t : s.tasks()) {
        try {
          store.submit(rating(t.task_id, 5, "e" + std::to_string(k % 4)));
        } catch (const DuplicateRatingError&) {
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(store.size() == 4 * s.tasks().size());
  RatingStore replay(s, dir / "log.jsonl");
  CHECK(replay.size() == store.size());
}

TEST_CASE("service status codes and admin gating") {
  const Session s = make_session();
  RatingStore store(s);
  RaterService svc(store, {"secret", true});
  const auto& t = s.tasks();

  CHECK(svc.post_rating(post_body(t[0].task_id, 7)).status == 201);
  CHECK(svc.post_rating(post_body(t[0].task_id, 7)).status == 409);
  CHECK(svc.post_rating(post_body(t[1].task_id, 11)).status == 422);
  CHECK(svc.post_rating(post_body("feed", 5)).status == 404);
  CHECK(svc.post_rating("{nope").status == 400);
  CHECK(svc.post_rating(R"({"task_id":1})").status == 422);

  CHECK(svc.aggregates("").status == 403);
  CHECK(svc.aggregates("wrong").status == 403);
  CHECK(svc.aggregates("secre").status == 403);
  CHECK(svc.aggregates("secret").status == 200);
  CHECK(svc.close_session("wrong").status == 403);
  CHECK(svc.close_session("secret").status == 200);
  CHECK(svc.aggregates("").status == 200);
  CHECK(svc.session_info("").body["session_open"] == false);

  RatingStore empty(s);
  RaterService closed(empty, {"", false});
  CHECK(closed.aggregates("").status == 409);
}

TEST_CASE("next task walks the session without revealing models") {
  const Session s = make_session();
  RatingStore store(s);
  RaterService svc(store, {"secret", true});
  CHECK(svc.next_task("").status == 400);
  for (std::size_t i = 0; i < s.tasks().size(); ++i) {
    const auto r = svc.next_task("e1");
    REQUIRE(r.status == 200);
    REQUIRE(r.body["done"] == false);
    REQUIRE(r.body["progress"]["rated"] == i);
    REQUIRE_FALSE(mentions_model(r.body.dump()));
    REQUIRE(svc.post_rating(post_body(r.body["task"]["task_id"], 6)).status == 201);
  }
  CHECK(svc.next_task("e1").body["done"] == true);
  CHECK(svc.next_task("e2").body["done"] == false);
  CHECK(svc.session_info("e1").body["rated"] == s.tasks().size());
}

TEST_CASE("HTTP API end to end") {
  testing::TempDir dir;
  const Session s = make_session();
  RatingStore store(s, dir / "log.jsonl");
  RaterService svc(store, {"secret", true});
  HttpServer server(svc, {});
  const int port = server.start();
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);

  auto info = cli.Get("/api/session?rater=e1");
  REQUIRE(info);
  CHECK(info->status == 200);
  CHECK(Json::parse(info->body)["task_count"] == 6);

  std::size_t posted = 0;
  for (;;) {
    auto next = cli.Get("/api/task/next?rater=e1");
    REQUIRE(next);
    REQUIRE(next->status == 200);
    REQUIRE_FALSE(mentions_model(next->body));
    const Json body = Json::parse(next->body);
    if (body["done"] == true) break;
    const std::string id = body["task"]["task_id"];
    auto res = cli.Post("/api/rating", post_body(id, 8), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    REQUIRE_FALSE(mentions_model(res->body));
    ++posted;
  }
  CHECK(posted == 6);

  auto dup = cli.Post("/api/rating", post_body(s.tasks()[0].task_id, 8), "application/json");
  CHECK(dup->status == 409);
  CHECK_FALSE(mentions_model(dup->body));
  CHECK(cli.Post("/api/rating", "not json", "application/json")->status == 400);
  CHECK(cli.Post("/api/rating", post_body(s.tasks()[0].task_id, 0, "e2"), "application/json")->status == 422);

  CHECK(cli.Get("/api/aggregate")->status == 403);
  CHECK(cli.Get("/api/aggregate", {{"X-Admin-Token", "secret"}})->status == 200);
  CHECK(cli.Post("/api/session/close", "", "application/json")->status == 403);
  CHECK(cli.Post("/api/session/close?admin=secret", "", "application/json")->status == 200);
  auto agg = cli.Get("/api/aggregate");
  REQUIRE(agg->status == 200);
  const Json aggregates = Json::parse(agg->body)["aggregates"];
  CHECK(aggregates.size() == 3);
  for (const auto& a : aggregates) CHECK(a["mean_display"] == "8.000");

  server.stop();
  CHECK(RatingStore(s, dir / "log.jsonl").size() == 6);
}

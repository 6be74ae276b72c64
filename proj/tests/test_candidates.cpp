#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "arsum/candidates.hpp"
#include "arsum/error.hpp"
#include "oracles.hpp"

using namespace arsum;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = ARSUM_FIXTURES;

ModelCard arabart_card() {
  return {"moussaKam/AraBART", 10, 5e-5, 0.01, 4, "adamW", 1024, 256};
}

}  // namespace

TEST_CASE("two-line file with a header") {
  const auto set = parse_candidates_jsonl(
      "{\"model_name\":\"AraBART\"}\n{\"id\":\"a\",\"summary\":\"x\"}\n{\"id\":\"b\",\"summary\":\"y\"}\n");
  CHECK(set.model_name() == "AraBART");
  CHECK(set.size() == 2);
  CHECK(*set.find("b") == "y");
  CHECK_FALSE(set.model_card().has_value());
}

TEST_CASE("AraBART model card parses and round-trips") {
  const auto set = parse_candidates(kFixtures / "candidates.arabart.jsonl");
  REQUIRE(set.model_card().has_value());
  const ModelCard& card = *set.model_card();
  CHECK(card == arabart_card());
  CHECK(card.epochs == 10);
  CHECK(card.learning_rate == 5e-5);
  CHECK(card.weight_decay == 0.01);
  CHECK(card.batch_size == 4);
  CHECK(card.optimizer == "adamW");
  CHECK(parse_model_card(to_json(card)) == card);

  const auto again = parse_candidates_jsonl(serialize_candidates(set));
  CHECK(again.model_name() == set.model_name());
  CHECK(again.model_card() == set.model_card());
  CHECK(again.entries() == set.entries());
}

TEST_CASE("model card validation") {
  Json j = to_json(arabart_card());
  j["epochs"] = 0;
  CHECK_THROWS_AS(parse_model_card(j), SchemaError);
  j = to_json(arabart_card());
  j.erase("optimizer");
  CHECK_THROWS_AS(parse_model_card(j), SchemaError);
  j = to_json(arabart_card());
  j["dropout"] = 0.1;
  CHECK_THROWS_AS(parse_model_card(j), SchemaError);
  j = to_json(arabart_card());
  j["batch_size"] = 4.5;
  CHECK_THROWS_AS(parse_model_card(j), SchemaError);
}

TEST_CASE("sidecar metadata, empty summaries kept") {
  const auto set = parse_candidates(kFixtures / "candidates.sidecar.jsonl");
  CHECK(set.model_name() == "mt5");
  CHECK(set.size() == 2);
  CHECK(*set.find("u1-l2-s2") == "");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_candidates_jsonl("{\"model_name\":\"m\"}\n{\"id\":\"a\",\"summary\":\"x\"}\n{\"id\":\"a\",\"summary\":\"y\"}\n"),
                  DuplicateIdError);
  CHECK_THROWS_AS(parse_candidates_jsonl("{\"id\":\"a\",\"summary\":\"x\"}\n"), MissingModelNameError);
  CHECK_THROWS_AS(parse_candidates_jsonl("{\"model_name\":\"\"}\n"), MissingModelNameError);
  CHECK_THROWS_AS(parse_candidates_jsonl(""), MissingModelNameError);
  CHECK_THROWS_AS(parse_candidates_jsonl("{\"model_name\":\"m\"}\n{\"id\":\"a\"}\n"), SchemaError);
  CHECK_THROWS_AS(parse_candidates_jsonl("{\"model_name\":\"m\"}\n{\"id\":\"a\",\"summary\":\"x\",\"score\":1}\n"), SchemaError);
  CHECK_THROWS_AS(parse_candidates_jsonl("{\"model_name\":\"m\"}\nnot json\n"), SchemaError);
  CHECK_THROWS_AS(parse_candidates(kFixtures / "nope.jsonl"), IoError);
  CHECK_THROWS_AS(CandidateSet(""), MissingModelNameError);
}

TEST_CASE("serialize then parse round-trips random sets") {
  oracle::Gen gen(51);
  for (int round = 0; round < 300; ++round) {
    CandidateSet set("m" + gen.unicode(6) + "x", gen.coin() ? std::optional(arabart_card()) : std::nullopt);
    for (std::size_t i = gen.size(0, 10); i > 0; --i) set.add("id" + std::to_string(i), gen.unicode(30));
    const auto again = parse_candidates_jsonl(serialize_candidates(set));
    REQUIRE(again.model_name() == set.model_name());
    REQUIRE(again.model_card() == set.model_card());
    REQUIRE(again.entries() == set.entries());
  }
}

TEST_CASE("align examples") {
  CandidateSet set("m");
  set.add("t1", "x");
  set.add("t2", "x");
  SplitAssignment split{1, {"r1", "r2"}, {"v1"}, {"t1", "t2"}};

  const auto exact = align(set, split, Subset::kTest);
  CHECK(exact.missing_ids.empty());
  CHECK(exact.extra_ids.empty());
  CHECK(exact.complete());

  split.test_ids.push_back("t3");
  const auto missing = align(set, split, Subset::kTest);
  CHECK(missing.missing_ids == std::vector<std::string>{"t3"});

  set.add("r1", "x");
  const auto extra = align(set, split, Subset::kTest);
  CHECK(extra.extra_ids == std::vector<std::string>{"r1"});
}

TEST_CASE("align is plain set arithmetic") {
  oracle::Gen gen(52);
  for (int round = 0; round < 1000; ++round) {
    std::set<std::string> split_ids, cand_ids;
    for (int i = 0; i < 20; ++i) {
      const std::string id = "r" + std::to_string(i);
      if (gen.coin()) split_ids.insert(id);
      if (gen.coin()) cand_ids.insert(id);
    }
    std::vector<std::string> ids(split_ids.begin(), split_ids.end());
    std::shuffle(ids.begin(), ids.end(), gen.engine());
    CandidateSet set("m");
    for (const auto& id : cand_ids) set.add(id, "s");

    const auto report = align(set, ids);
    std::vector<std::string> matched, missing, extra;
    for (const auto& id : ids) (cand_ids.count(id) ? matched : missing).push_back(id);
    for (const auto& [id, _] : set.entries()) {
      if (!split_ids.count(id)) extra.push_back(id);
    }
    REQUIRE(report.matched_ids == matched);
    REQUIRE(report.missing_ids == missing);
    std::sort(extra.begin(), extra.end());
    auto got_extra = report.extra_ids;
    std::sort(got_extra.begin(), got_extra.end());
    REQUIRE(got_extra == extra);
  }
}

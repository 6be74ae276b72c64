#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arsum/baseline.hpp"
#include "arsum/error.hpp"
#include "oracles.hpp"

using namespace arsum;

namespace {

std::string words(const std::string& w, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + w;
  return out;
}

}  // namespace

TEST_CASE("one sentence ranks first") {
  const auto s = score_sentences("الخلية وحدة البناء.", {});
  REQUIRE(s.size() == 1);
  CHECK(s[0].rank == 1);
  CHECK(s[0].score == 1.0);
}

TEST_CASE("max-frequency-scaled term frequency") {
  // a:4 b:1 c:2, max 4.  S1 = (4+4+4+1)/(4*4), S2 = (2+2+4)/(4*3).
  const auto s = score_sentences("a a a b. c c a.", {});
  REQUIRE(s.size() == 2);
  CHECK(s[0].score == 13.0 / 16.0);
  CHECK(s[1].score == 8.0 / 12.0);
  CHECK(s[0].rank == 1);
  CHECK(s[1].rank == 2);
}

TEST_CASE("ties go to the earlier sentence") {
  const auto s = score_sentences("b a c. c a b. a b c.", {});
  CHECK(s[0].rank == 1);
  CHECK(s[1].rank == 2);
  CHECK(s[2].rank == 3);
}

TEST_CASE("short sentences score zero") {
  ExtractiveConfig cfg;
  cfg.min_sentence_words = 3;
  const auto s = score_sentences("a a. a b c.", cfg);
  CHECK(s[0].score == 0.0);
  CHECK(s[1].rank == 1);
}

TEST_CASE("normalization decides which tokens are the same term") {
  ExtractiveConfig cfg;
  // Under paper-default "DNA," and "dna" are one term.
  const auto s = score_sentences("DNA, RNA. dna x.", cfg);
  CHECK(s[0].score == s[1].score);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(score_sentences("", {}), NoSentencesError);
  CHECK_THROWS_AS(summarize_extractive("  ", {}), NoSentencesError);
  ExtractiveConfig bad;
  bad.word_budget = 2;
  bad.min_sentence_words = 3;
  CHECK_THROWS_AS(summarize_extractive("a b c.", bad), ConfigError);
  bad.min_sentence_words = 0;
  CHECK_THROWS_AS(summarize_extractive("a b c.", bad), ConfigError);
}

TEST_CASE("text within budget comes back whole") {
  const std::string text = "الخلية وحدة البناء. للخلية غشاء. النواة تتحكم في الخلية.";
  CHECK(summarize_extractive(text, {}) == text);
}

TEST_CASE("budget below every sentence keeps only the top sentence") {
  ExtractiveConfig cfg;
  cfg.word_budget = 1;
  CHECK(summarize_extractive("a a a b. c c a.", cfg) == "a a a b.");
}

TEST_CASE("greedy selection under a 20-word budget") {
  const std::string s1 = words("a", 9) + " a.";
  const std::string s2 = "x0 x1 x2 x3 x4 x5 x6 x7 x8 x9.";
  const std::string s3 = words("a", 5) + " " + words("b", 4) + " b.";
  ExtractiveConfig cfg;
  cfg.word_budget = 20;
  CHECK(summarize_extractive(s1 + " " + s2 + " " + s3, cfg) == s1 + " " + s3);
  // Document order even when the later sentence ranks higher.
  CHECK(summarize_extractive(s2 + " " + s3 + " " + s1, cfg) == s3 + " " + s1);
}

TEST_CASE("an overflowing sentence is skipped, not the end of selection") {
  const std::string top = "a a a.";
  const std::string big = "a b c d e f g h.";
  const std::string small = "a b.";
  ExtractiveConfig cfg;
  cfg.word_budget = 6;
  CHECK(summarize_extractive(top + " " + big + " " + small, cfg) == top + " " + small);
}

TEST_CASE("extractive, in document order, within budget, deterministic") {
  oracle::Gen gen(41);
  const std::vector<std::string> vocab = {"خلية", "نواة", "غشاء", "طاقة", "ماء", "Cell", "dna", "الـخلية"};
  const std::vector<std::string> ends = {".", "؟", "!", "؛"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> sentences;
    std::string text;
    for (std::size_t k = gen.size(1, 6); k > 0; --k) {
      std::string s;
      for (std::size_t w = gen.size(1, 9); w > 0; --w) s += (s.empty() ? "" : " ") + gen.pick(vocab);
      s += gen.pick(ends);
      sentences.push_back(s);
      text += (text.empty() ? "" : " ") + s;
    }
    ExtractiveConfig cfg;
    cfg.word_budget = gen.size(1, 30);
    const std::string summary = summarize_extractive(text, cfg);
    REQUIRE(summary == summarize_extractive(text, cfg));

    const auto picked = segment_sentences(summary);
    REQUIRE_FALSE(picked.empty());
    std::size_t last = 0, total = 0;
    bool first = true;
    for (const auto& p : picked) {
      // Each output sentence is a source sentence, at a later position than the previous one.
      std::size_t pos = text.find(p.text, first ? 0 : last + 1);
      REQUIRE(pos != std::string::npos);
      if (!first) REQUIRE(pos > last);
      last = pos;
      first = false;
      total += tokenize_words(p.text).size();
    }
    if (picked.size() > 1) REQUIRE(total <= cfg.word_budget);
  }
}

TEST_CASE("summarize_corpus") {
  const Corpus corpus({{"a", "u", "l", "جملة أولى. جملة ثانية.", std::nullopt, "s"},
                       {"b", "u", "l", "نص قصير.", std::nullopt, "s"}});
  const auto all = summarize_corpus(corpus, {}, {});
  CHECK(all.model_name() == "baseline-extractive");
  CHECK(all.size() == 2);
  const auto some = summarize_corpus(corpus, {"b"}, {});
  CHECK(some.size() == 1);
  CHECK(*some.find("b") == "نص قصير.");
  CHECK_THROWS_AS(summarize_corpus(corpus, {"zz"}, {}), MissingRecordError);
}

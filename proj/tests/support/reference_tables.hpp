#pragma once

// Published ROUGE and expert-rating values as pre-computed inputs, deliberately
// listed out of order so the tests also exercise the sort.

#include <filesystem>
#include <string>
#include <vector>

#include "arsum/io.hpp"
#include "arsum/report.hpp"

namespace fixture {

inline arsum::CorpusRougeSummary rouge_row(std::string model, double r1, double r2, double rl) {
  arsum::CorpusRougeSummary s;
  s.model_name = std::move(model);
  s.averages[0] = {r1, 0, 0};
  s.averages[1] = {r2, 0, 0};
  s.averages[2] = {rl, 0, 0};
  s.averages[3] = {rl, 0, 0};
  s.record_count = 17;
  s.normalization = arsum::NormalizationConfig::paper_default();
  s.subset = "test";
  s.seed = 42;
  return s;
}

inline std::vector<arsum::CorpusRougeSummary> rouge_inputs() {
  return {rouge_row("mt5", 0.0566, 0, 0.0566), rouge_row("AraT5", 0.2065, 0.1153, 0.2065),
          rouge_row("AraBART", 0.2462, 0.1184, 0.2462), rouge_row("mBART50", 0.2431, 0.1392, 0.2431)};
}

inline std::vector<arsum::ExpertRow> expert_inputs() {
  return {{"MT5", 7.17, 22}, {"mBART50", 8.18, 22}, {"AraT5", 7.727, 22}, {"AraBART", 8.409, 22}};
}

inline std::string golden(const std::string& name) {
  return arsum::read_file(std::filesystem::path(ARSUM_GOLDEN) / name);
}

}  // namespace fixture

#pragma once

// Slow, obviously-correct reference implementations and random input
// generators shared by the test binaries. Nothing here calls into the
// library under test.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline std::vector<Tokens> all_ngrams(const Tokens& seq, std::size_t n) {
  std::vector<Tokens> out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    out.emplace_back(seq.begin() + static_cast<std::ptrdiff_t>(i),
                     seq.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  return out;
}

// Clipped matches by pairing: each reference n-gram consumes one equal
// candidate n-gram if any is left.
inline std::size_t clipped_matches(const Tokens& ref, const Tokens& cand, std::size_t n) {
  auto pool = all_ngrams(cand, n);
  std::size_t hits = 0;
  for (const auto& g : all_ngrams(ref, n)) {
    for (auto it = pool.begin(); it != pool.end(); ++it) {
      if (*it == g) {
        pool.erase(it);
        ++hits;
        break;
      }
    }
  }
  return hits;
}

inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline double rouge_n_recall(const Tokens& ref, const Tokens& cand, std::size_t n) {
  return ratio(clipped_matches(ref, cand, n), all_ngrams(ref, n).size());
}

inline double rouge_n_precision(const Tokens& ref, const Tokens& cand, std::size_t n) {
  return ratio(clipped_matches(ref, cand, n), all_ngrams(cand, n).size());
}

// Textbook recursion on suffixes, memoized.
inline std::size_t lcs(const Tokens& x, const Tokens& y) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == x.size() || j == y.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = x[i] == y[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = best;
    return best;
  };
  return go(0, 0);
}

inline double mean(const std::vector<int>& values) {
  long long sum = 0;
  for (int v : values) sum += v;
  return static_cast<double>(sum) / static_cast<double>(values.size());
}

// Plain left-to-right sum; inputs here are small and well scaled.
inline double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Generators

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return size(0, 1) == 1; }
  template <typename T>
  const T& pick(const std::vector<T>& items) { return items[size(0, items.size() - 1)]; }
  std::mt19937_64& engine() { return rng_; }

  // Tokens drawn from "t0".."t{alphabet-1}".
  Tokens tokens(std::size_t max_len, std::size_t alphabet) {
    Tokens out(size(0, max_len));
    for (auto& t : out) t = "t" + std::to_string(size(0, alphabet - 1));
    return out;
  }

  // Mixed-script text built from the characters cleaning and normalization
  // care about: whitespace and control characters, zero-width marks,
  // tatweel, harakat, alef and ta marbuta variants, punctuation, Latin in
  // both cases, and assorted other scripts.
  std::string unicode(std::size_t max_len) {
    static const std::vector<char32_t> pool = {
        U' ', U'\t', U'\n', U'\r', U'\v', U'\f', 0x85, 0xA0, 0x2003, 0x3000,
        0x00, 0x01, 0x1B, 0x7F, 0x9F,
        0x200B, 0x200C, 0x200D, 0x200E, 0x2060, 0xFEFF, 0x061C,
        0x0640,
        0x064B, 0x064E, 0x0650, 0x0651, 0x0652, 0x0670,
        0x0623, 0x0625, 0x0622, 0x0627, 0x0629, 0x0647,
        0x0628, 0x062A, 0x0633, 0x0645, 0x0644, 0x0646,
        U'.', U',', U'!', U'?', U'(', U')', U'-', 0x060C, 0x061B, 0x061F, 0x066A, 0x06D4,
        0x00AB, 0x00BB, 0x2014, 0x2026,
        U'A', U'Z', U'a', U'z', U'Q', U'0', U'9',
        0x00C9, 0x00E9, 0x00DF, 0x0130, 0x0131, 0x0178, 0x1E9E, 0x1E00, 0xFF21,
        0x0416, 0x03A9, 0x05D0, 0x4E2D, 0x1F600, 0x10FFFF};
    std::u32string s;
    const std::size_t n = size(0, max_len);
    for (std::size_t i = 0; i < n; ++i) {
      // Mostly pool characters, sometimes any scalar value.
      if (size(0, 9) == 0) {
        char32_t c;
        do c = static_cast<char32_t>(size(1, 0x10FFFF));
        while (c >= 0xD800 && c <= 0xDFFF);
        s.push_back(c);
      } else {
        s.push_back(pick(pool));
      }
    }
    return utf8(s);
  }

  static std::string utf8(const std::u32string& s) {
    std::string out;
    for (char32_t c : s) {
      if (c < 0x80) {
        out.push_back(static_cast<char>(c));
      } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
      } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
      } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
      }
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace promptshield::corpus {

// Ordered list of normalized tokens. Tokens are non-empty and contain no
// whitespace.
using TokenSeq = std::vector<std::string>;

// Splits on Unicode whitespace, strips leading/trailing punctuation from
// each fragment, lowercases ASCII letters and drops purely punctuational
// fragments. Deterministic; invalid UTF-8 bytes pass through as single
// code points.
TokenSeq tokenize(const std::string& text);

// Length of tokenize(text).
std::size_t token_count(const std::string& text);

// Canonical matching/deduplication key: tokens re-joined with single spaces.
std::string normalize_phrase(const std::string& phrase);

std::string join_tokens(const TokenSeq& tokens);

// Whitespace split that preserves fragments verbatim (case and punctuation
// intact). Used by text transformations that must not normalize content.
std::vector<std::string> split_whitespace_raw(const std::string& text);

// True iff phrase occurs as a contiguous subsequence of haystack.
// Throws std::invalid_argument if phrase is empty.
bool find_phrase(const TokenSeq& haystack, const TokenSeq& phrase);

// Token occurrence counts. Absent tokens count as zero.
class FrequencyTable {
 public:
  void add(const std::string& token, std::uint64_t n = 1);
  void add_text(const std::string& text);
  void merge(const FrequencyTable& other);

  std::uint64_t count(const std::string& token) const;
  std::uint64_t total() const { return total_; }
  bool empty() const { return counts_.empty(); }
  std::size_t distinct() const { return counts_.size(); }
  const std::unordered_map<std::string, std::uint64_t>& counts() const {
    return counts_;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

FrequencyTable build_frequency_table(const std::vector<std::string>& texts);

}  // namespace promptshield::corpus

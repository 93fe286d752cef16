#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace promptshield::ledger {

// One victim-model interaction. answer_text is the clean answer with any
// watermark declaration already stripped; watermark_set holds the declared
// phrases, deduplicated after normalization.
struct QueryRecord {
  std::string query_id;
  std::string query_text;
  std::string answer_text;
  std::vector<std::string> watermark_set;
  std::string template_id;
  std::string created_at;  // RFC 3339 UTC, e.g. 2024-01-01T00:00:00Z

  bool operator==(const QueryRecord&) const = default;
};

// Throws Error when a record violates its invariants (empty query_id,
// empty watermark entries).
void validate_record(const QueryRecord& record);

// Trims entries, drops empties, dedups by normalized form keeping the first
// occurrence.
std::vector<std::string> dedup_watermarks(const std::vector<std::string>& phrases);

// Append-only, in-memory record store with unique query ids.
class Ledger {
 public:
  Ledger() = default;
  explicit Ledger(std::string source_tag) : source_tag_(std::move(source_tag)) {}

  // Throws Error on invalid records or duplicate query_id.
  void append(QueryRecord record);

  const std::vector<QueryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool contains(const std::string& query_id) const;
  // Throws Error if the id is unknown.
  const QueryRecord& at(const std::string& query_id) const;

  const std::string& source_tag() const { return source_tag_; }
  void set_source_tag(std::string tag) { source_tag_ = std::move(tag); }

  std::vector<std::string> query_ids() const;
  // Union of all watermark sets, deduplicated after normalization,
  // in first-seen order.
  std::vector<std::string> union_watermarks() const;

  bool operator==(const Ledger& other) const { return records_ == other.records_; }

 private:
  std::vector<QueryRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string source_tag_;
};

// JSON-lines persistence. One object per line with keys
// query_id, query_text, answer_text, watermark_set, template_id, created_at.
std::string record_to_json_line(const QueryRecord& record);
// Throws ParseError on malformed JSON or missing/mistyped fields.
QueryRecord record_from_json_line(const std::string& line);

// Throws ParseError naming the offending line number.
Ledger load_ledger(const std::filesystem::path& path);
void save_ledger(const Ledger& ledger, const std::filesystem::path& path);

// Subset restricted to the given ids, in original ledger order.
// Throws Error listing ids not present in the ledger.
Ledger select_by_ids(const Ledger& ledger, const std::vector<std::string>& ids);

// Durable single-writer appender: loads any existing file, then flushes each
// appended record to disk immediately. Readers use the in-memory snapshot.
class LedgerAppender {
 public:
  explicit LedgerAppender(std::filesystem::path path);

  // Thread-safe; throws Error on duplicate ids, leaves the file untouched.
  void append(const QueryRecord& record);

  const Ledger& snapshot() const { return ledger_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  Ledger ledger_;
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace promptshield::ledger

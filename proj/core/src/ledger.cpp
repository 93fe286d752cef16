#include "promptshield/ledger.hpp"

#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "promptshield/corpus.hpp"
#include "promptshield/errors.hpp"

namespace promptshield::ledger {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

const std::string& require_string(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("missing required field '") + key + "'");
  }
  if (!it->is_string()) {
    throw ParseError(std::string("field '") + key + "' must be a string");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

void validate_record(const QueryRecord& record) {
  if (record.query_id.empty()) {
    throw Error("query record has empty query_id");
  }
  for (const auto& phrase : record.watermark_set) {
    if (trim(phrase).empty()) {
      throw Error("record '" + record.query_id +
                  "' has an empty watermark_set entry");
    }
  }
}

std::vector<std::string> dedup_watermarks(const std::vector<std::string>& phrases) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& raw : phrases) {
    std::string phrase = trim(raw);
    if (phrase.empty()) continue;
    std::string key = corpus::normalize_phrase(phrase);
    if (key.empty()) key = phrase;  // purely punctuational entries dedup verbatim
    if (seen.insert(key).second) out.push_back(std::move(phrase));
  }
  return out;
}

void Ledger::append(QueryRecord record) {
  validate_record(record);
  if (index_.contains(record.query_id)) {
    throw Error("duplicate query_id '" + record.query_id + "'");
  }
  index_.emplace(record.query_id, records_.size());
  records_.push_back(std::move(record));
}

bool Ledger::contains(const std::string& query_id) const {
  return index_.contains(query_id);
}

const QueryRecord& Ledger::at(const std::string& query_id) const {
  auto it = index_.find(query_id);
  if (it == index_.end()) {
    throw Error("unknown query_id '" + query_id + "'");
  }
  return records_[it->second];
}

std::vector<std::string> Ledger::query_ids() const {
  std::vector<std::string> ids;
  ids.reserve(records_.size());
  for (const auto& record : records_) ids.push_back(record.query_id);
  return ids;
}

std::vector<std::string> Ledger::union_watermarks() const {
  std::vector<std::string> all;
  for (const auto& record : records_) {
    all.insert(all.end(), record.watermark_set.begin(), record.watermark_set.end());
  }
  return dedup_watermarks(all);
}

std::string record_to_json_line(const QueryRecord& record) {
  ordered_json obj;
  obj["query_id"] = record.query_id;
  obj["query_text"] = record.query_text;
  obj["answer_text"] = record.answer_text;
  obj["watermark_set"] = record.watermark_set;
  obj["template_id"] = record.template_id;
  obj["created_at"] = record.created_at;
  return obj.dump();
}

QueryRecord record_from_json_line(const std::string& line) {
  ordered_json obj = ordered_json::parse(line, nullptr, false);
  if (obj.is_discarded()) throw ParseError("invalid JSON");
  if (!obj.is_object()) throw ParseError("line is not a JSON object");

  QueryRecord record;
  record.query_id = require_string(obj, "query_id");
  record.query_text = require_string(obj, "query_text");
  record.answer_text = require_string(obj, "answer_text");
  record.template_id = require_string(obj, "template_id");
  record.created_at = require_string(obj, "created_at");

  auto it = obj.find("watermark_set");
  if (it == obj.end()) throw ParseError("missing required field 'watermark_set'");
  if (!it->is_array()) throw ParseError("field 'watermark_set' must be an array");
  for (const auto& entry : *it) {
    if (!entry.is_string()) {
      throw ParseError("field 'watermark_set' must contain only strings");
    }
    record.watermark_set.push_back(entry.get<std::string>());
  }
  return record;
}

Ledger load_ledger(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open ledger file '" + path.string() + "'");
  }
  Ledger ledger(path.filename().string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      ledger.append(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw ParseError("ledger '" + path.string() + "' line " +
                       std::to_string(line_no) + ": " + e.what());
    }
  }
  return ledger;
}

void save_ledger(const Ledger& ledger, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  for (const auto& record : ledger.records()) {
    out << record_to_json_line(record) << '\n';
  }
  if (!out) {
    throw Error("failed while writing ledger '" + path.string() + "'");
  }
}

Ledger select_by_ids(const Ledger& ledger, const std::vector<std::string>& ids) {
  std::unordered_set<std::string> wanted;
  std::vector<std::string> unknown;
  for (const auto& id : ids) {
    if (!ledger.contains(id)) {
      unknown.push_back(id);
    } else {
      wanted.insert(id);
    }
  }
  if (!unknown.empty()) {
    std::string message = "unknown query ids:";
    for (const auto& id : unknown) message += " '" + id + "'";
    throw Error(message);
  }
  Ledger subset(ledger.source_tag());
  for (const auto& record : ledger.records()) {
    if (wanted.contains(record.query_id)) subset.append(record);
  }
  return subset;
}

LedgerAppender::LedgerAppender(std::filesystem::path path)
    : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    ledger_ = load_ledger(path_);
  } else {
    ledger_.set_source_tag(path_.filename().string());
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) {
    throw Error("cannot open ledger file '" + path_.string() + "' for append");
  }
}

void LedgerAppender::append(const QueryRecord& record) {
  std::lock_guard lock(mu_);
  ledger_.append(record);  // validates and enforces unique ids
  out_ << record_to_json_line(record) << '\n';
  out_.flush();
  if (!out_) {
    throw Error("failed while appending to ledger '" + path_.string() + "'");
  }
}

}  // namespace promptshield::ledger

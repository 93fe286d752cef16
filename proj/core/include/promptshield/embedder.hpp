#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptshield/ledger.hpp"

namespace promptshield::embed {

inline constexpr std::string_view kQueryPlaceholder = "{USER QUERY}";
inline constexpr std::string_view kDeclarationKey = "WATERMARKS";

// A system prompt with exactly one {USER QUERY} placeholder.
// declares_watermarks marks templates that ask the model to list its
// watermarks at the end of the answer.
class PromptTemplate {
 public:
  // Throws Error unless body contains the placeholder exactly once.
  PromptTemplate(std::string template_id, std::string body, bool declares_watermarks);

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  bool declares_watermarks() const { return declares_; }

 private:
  std::string id_;
  std::string body_;
  bool declares_;
};

// The six built-in system prompts, ids "p1".."p6". p4-p6 declare watermarks.
const std::vector<PromptTemplate>& builtin_templates();
// Throws Error for unknown ids.
const PromptTemplate& builtin_template(const std::string& id);

// Custom template file: first line `id<TAB>declares` (declares in {0,1}),
// remaining lines are the body.
PromptTemplate load_template_file(const std::filesystem::path& path);

// Replaces the placeholder with the query verbatim. Throws Error on an
// empty query.
std::string wrap_query(const PromptTemplate& tpl, const std::string& user_query);

struct Declaration {
  std::string clean_answer;
  std::vector<std::string> watermarks;  // trimmed, deduplicated after normalization
};

// If the final non-empty line is `WATERMARKS: w1; w2; ...` (key matched
// case-insensitively) it is stripped and its phrases returned; otherwise the
// text is returned unchanged with no watermarks.
Declaration parse_watermark_declaration(const std::string& raw_text);

struct UpstreamResponse {
  std::string raw_text;
  std::string model_name;
  std::chrono::milliseconds latency{0};
};

class UpstreamClient {
 public:
  virtual ~UpstreamClient() = default;
  // Throws TransportError on failure.
  virtual UpstreamResponse complete(const std::string& prompt) = 0;
};

// Offline stand-in for a cooperative upstream model: answers with
// deterministic filler text, embeds a few watermark words from a bundled
// pool and, when `declare` is set, appends the declaration line.
class MockUpstreamClient : public UpstreamClient {
 public:
  explicit MockUpstreamClient(std::uint64_t seed = 0, bool declare = true);
  UpstreamResponse complete(const std::string& prompt) override;

 private:
  std::uint64_t seed_;
  bool declare_;
};

struct HttpUpstreamConfig {
  std::string base_url;  // e.g. http://localhost:8080
  std::string model_name;
  std::string api_key;   // read from PROMPTSHIELD_API_KEY by the CLI
  std::string completions_path = "/v1/chat/completions";
  int timeout_seconds = 30;
  int max_retries = 2;   // fixed retry count on transport failures
};

// Chat-completion client: posts {model, messages:[{role:"user",content}]}
// and returns choices[0].message.content.
class HttpUpstreamClient : public UpstreamClient {
 public:
  explicit HttpUpstreamClient(HttpUpstreamConfig config);
  ~HttpUpstreamClient() override;
  UpstreamResponse complete(const std::string& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct EmbedResult {
  ledger::QueryRecord record;
  // Set when the template declares watermarks but the upstream answer
  // carried no declaration line; the record is stored regardless.
  bool declaration_missing = false;
  // Declared phrases that do not actually occur in the clean answer. They
  // stay in the stored watermark_set; this only flags the inconsistency.
  std::vector<std::string> unverified_watermarks;
};

// Wraps queries, calls the upstream, strips and records the declaration.
class Embedder {
 public:
  Embedder(PromptTemplate tpl, UpstreamClient& client);

  // Seeded mode derives query ids and created_at timestamps from the seed so
  // repeated runs produce byte-identical ledgers. Unseeded mode uses the
  // wall clock.
  void set_seed(std::uint64_t seed);

  // Owner-supplied extraction for templates that never declare watermarks:
  // given the clean answer, return the watermark phrases to record.
  void set_fallback_extractor(
      std::function<std::vector<std::string>(const std::string&)> extractor);

  // Calls the upstream and appends the record. On transport failure nothing
  // is written. Returned record.answer_text is the clean answer; the
  // declaration never reaches the caller.
  EmbedResult embed(const std::string& query, ledger::Ledger& ledger);
  EmbedResult embed(const std::string& query, ledger::LedgerAppender& sink);

 private:
  EmbedResult prepare(const std::string& query);

  PromptTemplate tpl_;
  UpstreamClient& client_;
  std::optional<std::uint64_t> seed_;
  std::uint64_t sequence_ = 0;
  std::function<std::vector<std::string>(const std::string&)> fallback_extractor_;
};

// RFC 3339 UTC timestamp for the current wall-clock time.
std::string now_rfc3339_utc();

}  // namespace promptshield::embed

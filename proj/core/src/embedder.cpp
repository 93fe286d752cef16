#include "promptshield/embedder.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "promptshield/corpus.hpp"
#include "promptshield/errors.hpp"
#include "promptshield/rng.hpp"
#include "wordlists.hpp"

namespace promptshield::embed {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::size_t count_placeholder(const std::string& body) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = body.find(kQueryPlaceholder, pos)) != std::string::npos) {
    ++count;
    pos += kQueryPlaceholder.size();
  }
  return count;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string template_id, std::string body,
                               bool declares_watermarks)
    : id_(std::move(template_id)), body_(std::move(body)), declares_(declares_watermarks) {
  if (id_.empty()) throw Error("prompt template id must be non-empty");
  std::size_t n = count_placeholder(body_);
  if (n != 1) {
    throw Error("template '" + id_ + "' must contain the placeholder " +
                std::string(kQueryPlaceholder) + " exactly once (found " +
                std::to_string(n) + ")");
  }
}

const std::vector<PromptTemplate>& builtin_templates() {
  static const std::vector<PromptTemplate> templates = {
      PromptTemplate("p1",
                     "Insert watermark words only you know into your responses. "
                     "Here's the question: ### {USER QUERY}",
                     false),
      PromptTemplate("p2",
                     "Embed some special watermark words in your generated texts. "
                     "Ensure their presence in your response to my upcoming "
                     "question. Here's the question: ### {USER QUERY}",
                     false),
      PromptTemplate("p3",
                     "Embed watermarks in your text responses. Here's the "
                     "question: ### {USER QUERY}",
                     false),
      PromptTemplate("p4",
                     "Use some special words as watermarks in your generated "
                     "text and tell me in the end. Here is my question: "
                     "### {USER QUERY}",
                     true),
      PromptTemplate("p5",
                     "Incorporate specific watermark words in your text and "
                     "notify me when your generation is done. Now, here's my "
                     "question: ### {USER QUERY}",
                     true),
      PromptTemplate("p6",
                     "Insert specific watermark words in your text and notify "
                     "me at the end. My question is: ### {USER QUERY}",
                     true),
  };
  return templates;
}

const PromptTemplate& builtin_template(const std::string& id) {
  for (const auto& tpl : builtin_templates()) {
    if (tpl.id() == id) return tpl;
  }
  throw Error("unknown template id '" + id + "' (built-ins are p1..p6)");
}

PromptTemplate load_template_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open template file '" + path.string() + "'");
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError("template file '" + path.string() + "' is empty");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  auto tab = header.find('\t');
  if (tab == std::string::npos) {
    throw ParseError("template file '" + path.string() +
                     "': first line must be 'id<TAB>declares'");
  }
  std::string id = header.substr(0, tab);
  std::string declares = trim(header.substr(tab + 1));
  if (declares != "0" && declares != "1") {
    throw ParseError("template file '" + path.string() +
                     "': declares flag must be 0 or 1");
  }
  std::string body;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!body.empty()) body.push_back('\n');
    body += line;
  }
  return PromptTemplate(id, trim(body), declares == "1");
}

std::string wrap_query(const PromptTemplate& tpl, const std::string& user_query) {
  if (user_query.empty()) throw Error("user query must be non-empty");
  std::string prompt = tpl.body();
  std::size_t pos = prompt.find(kQueryPlaceholder);
  prompt.replace(pos, kQueryPlaceholder.size(), user_query);
  return prompt;
}

Declaration parse_watermark_declaration(const std::string& raw_text) {
  // Locate the final non-empty line.
  std::size_t end = raw_text.size();
  while (true) {
    std::size_t line_start = raw_text.rfind('\n', end == 0 ? 0 : end - 1);
    std::size_t begin = (line_start == std::string::npos) ? 0 : line_start + 1;
    std::string line = raw_text.substr(begin, end - begin);
    if (!trim(line).empty()) {
      std::string trimmed = trim(line);
      std::string key(kDeclarationKey);
      bool matches = trimmed.size() > key.size();
      if (matches) {
        for (std::size_t i = 0; i < key.size(); ++i) {
          if (std::toupper(static_cast<unsigned char>(trimmed[i])) != key[i]) {
            matches = false;
            break;
          }
        }
        if (matches) {
          std::size_t after = key.size();
          while (after < trimmed.size() &&
                 std::isspace(static_cast<unsigned char>(trimmed[after]))) {
            ++after;
          }
          matches = after < trimmed.size() && trimmed[after] == ':';
          if (matches) {
            Declaration decl;
            std::string payload = trimmed.substr(after + 1);
            std::vector<std::string> phrases;
            std::stringstream ss(payload);
            std::string phrase;
            while (std::getline(ss, phrase, ';')) phrases.push_back(phrase);
            decl.watermarks = ledger::dedup_watermarks(phrases);
            std::string clean = raw_text.substr(0, begin);
            while (!clean.empty() &&
                   std::isspace(static_cast<unsigned char>(clean.back()))) {
              clean.pop_back();
            }
            decl.clean_answer = std::move(clean);
            return decl;
          }
        }
      }
      break;  // final non-empty line is not a declaration
    }
    if (begin == 0) break;
    end = line_start;
  }
  return Declaration{raw_text, {}};
}

MockUpstreamClient::MockUpstreamClient(std::uint64_t seed, bool declare)
    : seed_(seed), declare_(declare) {}

UpstreamResponse MockUpstreamClient::complete(const std::string& prompt) {
  std::mt19937_64 g(rng::derive_seed(seed_, rng::fnv1a(prompt)));
  const auto& pool = wordlists::watermark_pool();
  const auto& fillers = wordlists::filler_words();

  std::size_t n_watermarks = 2 + rng::bounded(g, 3);
  std::vector<std::string> watermarks;
  while (watermarks.size() < n_watermarks) {
    std::string w(pool[rng::bounded(g, pool.size())]);
    bool dup = false;
    for (const auto& have : watermarks) dup = dup || have == w;
    if (!dup) watermarks.push_back(std::move(w));
  }

  std::size_t n_fillers = 30 + rng::bounded(g, 31);
  std::vector<std::string> tokens;
  tokens.reserve(n_fillers + n_watermarks);
  for (std::size_t i = 0; i < n_fillers; ++i) {
    tokens.emplace_back(fillers[rng::bounded(g, fillers.size())]);
  }
  for (const auto& w : watermarks) {
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(
                                       rng::bounded(g, tokens.size() + 1)),
                  w);
  }

  std::string text;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) text.push_back(' ');
    text += tokens[i];
  }
  text.push_back('.');
  if (declare_) {
    text += "\n" + std::string(kDeclarationKey) + ": ";
    for (std::size_t i = 0; i < watermarks.size(); ++i) {
      if (i > 0) text += "; ";
      text += watermarks[i];
    }
  }
  return UpstreamResponse{std::move(text), "mock", std::chrono::milliseconds(0)};
}

struct HttpUpstreamClient::Impl {
  HttpUpstreamConfig config;
  std::string host;  // scheme://host:port for httplib
};

namespace {

std::string client_host(const std::string& base_url) {
  // httplib::Client takes scheme://host[:port]; strip any path suffix.
  auto scheme_end = base_url.find("://");
  std::size_t path_start =
      base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  return path_start == std::string::npos ? base_url : base_url.substr(0, path_start);
}

}  // namespace

HttpUpstreamClient::HttpUpstreamClient(HttpUpstreamConfig config)
    : impl_(std::make_unique<Impl>()) {
  if (config.base_url.empty()) {
    throw Error("upstream base URL must be configured");
  }
  impl_->host = client_host(config.base_url);
  impl_->config = std::move(config);
}

HttpUpstreamClient::~HttpUpstreamClient() = default;

UpstreamResponse HttpUpstreamClient::complete(const std::string& prompt) {
  const auto& cfg = impl_->config;
  nlohmann::json body{
      {"model", cfg.model_name},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    httplib::Client client(impl_->host);
    client.set_connection_timeout(cfg.timeout_seconds, 0);
    client.set_read_timeout(cfg.timeout_seconds, 0);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + cfg.api_key);
    }
    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(cfg.completions_path, headers, payload, "application/json");
    auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "upstream returned HTTP " + std::to_string(res->status);
      if (res->status >= 500) continue;  // retry server errors only
      throw TransportError(last_error);
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      throw TransportError("upstream returned invalid JSON");
    }
    try {
      std::string text = parsed.at("choices").at(0).at("message").at("content");
      return UpstreamResponse{std::move(text), cfg.model_name, latency};
    } catch (const nlohmann::json::exception&) {
      throw TransportError("upstream response missing choices[0].message.content");
    }
  }
  throw TransportError("upstream request failed after " +
                       std::to_string(cfg.max_retries + 1) + " attempts: " +
                       last_error);
}

std::string now_rfc3339_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm_utc.tm_year + 1900, tm_utc.tm_mon + 1, tm_utc.tm_mday,
                tm_utc.tm_hour, tm_utc.tm_min, tm_utc.tm_sec);
  return buf;
}

namespace {

// Seeded runs anchor timestamps here and advance one second per record.
constexpr std::time_t kSeededEpoch = 1704067200;  // 2024-01-01T00:00:00Z

std::string rfc3339_from_epoch(std::time_t t) {
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm_utc.tm_year + 1900, tm_utc.tm_mon + 1, tm_utc.tm_mday,
                tm_utc.tm_hour, tm_utc.tm_min, tm_utc.tm_sec);
  return buf;
}

}  // namespace

Embedder::Embedder(PromptTemplate tpl, UpstreamClient& client)
    : tpl_(std::move(tpl)), client_(client) {}

void Embedder::set_seed(std::uint64_t seed) { seed_ = seed; }

void Embedder::set_fallback_extractor(
    std::function<std::vector<std::string>(const std::string&)> extractor) {
  fallback_extractor_ = std::move(extractor);
}

EmbedResult Embedder::prepare(const std::string& query) {
  std::string prompt = wrap_query(tpl_, query);
  UpstreamResponse response = client_.complete(prompt);
  Declaration decl = parse_watermark_declaration(response.raw_text);

  EmbedResult result;
  result.declaration_missing = tpl_.declares_watermarks() && decl.watermarks.empty();
  if (decl.watermarks.empty() && fallback_extractor_) {
    decl.watermarks = ledger::dedup_watermarks(fallback_extractor_(decl.clean_answer));
  }
  const corpus::TokenSeq answer_tokens = corpus::tokenize(decl.clean_answer);
  for (const auto& phrase : decl.watermarks) {
    const corpus::TokenSeq phrase_tokens = corpus::tokenize(phrase);
    if (phrase_tokens.empty() ||
        !corpus::find_phrase(answer_tokens, phrase_tokens)) {
      result.unverified_watermarks.push_back(phrase);
    }
  }

  std::uint64_t seq = sequence_++;
  ledger::QueryRecord& record = result.record;
  if (seed_.has_value()) {
    char id[40];
    std::snprintf(id, sizeof(id), "q%06llu-%08llx",
                  static_cast<unsigned long long>(seq),
                  static_cast<unsigned long long>(
                      rng::derive_seed(*seed_, seq) & 0xffffffffULL));
    record.query_id = id;
    record.created_at = rfc3339_from_epoch(kSeededEpoch + static_cast<std::time_t>(seq));
  } else {
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
    record.query_id = "q" + std::to_string(micros) + "-" + std::to_string(seq);
    record.created_at = now_rfc3339_utc();
  }
  record.query_text = query;
  record.answer_text = decl.clean_answer;
  record.watermark_set = std::move(decl.watermarks);
  record.template_id = tpl_.id();
  return result;
}

EmbedResult Embedder::embed(const std::string& query, ledger::Ledger& ledger) {
  EmbedResult result = prepare(query);
  ledger.append(result.record);
  return result;
}

EmbedResult Embedder::embed(const std::string& query, ledger::LedgerAppender& sink) {
  EmbedResult result = prepare(query);
  sink.append(result.record);
  return result;
}

}  // namespace promptshield::embed

#include "gateway.hpp"

#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "promptshield/errors.hpp"

namespace promptshield::cli {

struct Gateway::Impl {
  embed::Embedder embedder;
  httplib::Server server;
  std::thread worker;
  std::atomic<bool> running{false};
  std::mutex embed_mu;

  Impl(embed::PromptTemplate tpl, embed::UpstreamClient& client,
       ledger::LedgerAppender& sink, std::optional<std::uint64_t> embedder_seed)
      : embedder(std::move(tpl), client) {
    if (embedder_seed.has_value()) embedder.set_seed(*embedder_seed);
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"status\":\"ok\"}\n", "application/json");
    });
    server.Post("/v1/query", [this, &sink](const httplib::Request& req,
                                           httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("query") ||
          !body["query"].is_string() || body["query"].get<std::string>().empty()) {
        res.status = 400;
        res.set_content("{\"error\":\"body must be {\\\"query\\\": string}\"}\n",
                        "application/json");
        return;
      }
      try {
        embed::EmbedResult result;
        {
          // Embedder sequence numbers and ledger appends stay serialized;
          // upstream latency dominates anyway.
          std::lock_guard lock(embed_mu);
          result = embedder.embed(body["query"].get<std::string>(), sink);
        }
        nlohmann::ordered_json reply;
        reply["answer"] = result.record.answer_text;
        reply["query_id"] = result.record.query_id;
        if (result.declaration_missing) reply["warning"] = "declaration_missing";
        res.set_content(reply.dump() + "\n", "application/json");
      } catch (const TransportError& e) {
        res.status = 502;
        nlohmann::json err{{"error", e.what()}};
        res.set_content(err.dump() + "\n", "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        nlohmann::json err{{"error", e.what()}};
        res.set_content(err.dump() + "\n", "application/json");
      }
    });
  }
};

Gateway::Gateway(embed::PromptTemplate tpl, embed::UpstreamClient& client,
                 ledger::LedgerAppender& sink,
                 std::optional<std::uint64_t> embedder_seed)
    : impl_(std::make_unique<Impl>(std::move(tpl), client, sink, embedder_seed)) {}

Gateway::~Gateway() { stop(); }

bool Gateway::listen(const std::string& host, int port) {
  impl_->running = true;
  const bool ok = impl_->server.listen(host, port);
  impl_->running = false;
  return ok;
}

int Gateway::start_async(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw Error("gateway failed to bind a port on " + host);
  impl_->running = true;
  impl_->worker = std::thread([this] {
    impl_->server.listen_after_bind();
    impl_->running = false;
  });
  impl_->server.wait_until_ready();
  return port;
}

void Gateway::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->running = false;
}

bool Gateway::running() const { return impl_->running; }

}  // namespace promptshield::cli

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "promptshield/embedder.hpp"
#include "promptshield/ledger.hpp"

namespace promptshield::cli {

// Watermarking HTTP gateway. POST /v1/query takes {"query": string} and
// returns {"answer": string, "query_id": string}; the watermark declaration
// is stripped before the answer leaves the gateway. GET /healthz reports
// liveness. Records are appended durably per request.
class Gateway {
 public:
  // embedder_seed makes record ids and timestamps deterministic for
  // reproducible serve sessions.
  Gateway(embed::PromptTemplate tpl, embed::UpstreamClient& client,
          ledger::LedgerAppender& sink,
          std::optional<std::uint64_t> embedder_seed = std::nullopt);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Blocks until stop() or a listen error. Returns false on bind failure.
  bool listen(const std::string& host, int port);

  // Binds an ephemeral port and serves from a background thread. Returns the
  // bound port. Throws Error on bind failure.
  int start_async(const std::string& host);

  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace promptshield::cli

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "smscorpus/pipeline.hpp"

namespace smscorpus {

/// Transport-independent request, so the routing can be exercised without
/// sockets.
struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceOptions {
  std::size_t max_payload_bytes = 1 << 20;
};

/// JSON API over a store: submission intake, browsing, statistics, releases
/// and the moderation queue. Thread-safe; mutations serialize through the
/// store's single-writer lock.
class CorpusService {
 public:
  CorpusService(Store& store, const Toolkit& toolkit, ServiceOptions options = {});

  HttpResponse handle(const HttpRequest& request);

  /// Blocks serving HTTP until stop() is called.
  void listen(const std::string& host, int port);
  /// Binds an ephemeral port, serves on a background thread and returns the
  /// port.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

  ~CorpusService();

 private:
  struct Server;

  Store& store_;
  const Toolkit& toolkit_;
  ServiceOptions options_;
  std::unique_ptr<Server> server_;
};

}  // namespace smscorpus

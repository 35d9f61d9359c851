#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "nitireward/config.hpp"

namespace httplib {
class Server;
}

namespace nitireward {

struct HttpReply {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Status code for an error raised while serving a request:
/// Input / InvalidArgument -> 400, Config -> 422, Upstream / UpstreamReply -> 502.
int http_status(ErrorKind kind) noexcept;

// {"error": {"kind": ..., "message": ...}}
nlohmann::json error_body(ErrorKind kind, const std::string& message);

/// POST /v1/score and GET /healthz over one config and its backends. Handlers
/// keep no state between requests.
class ScoringService {
 public:
  static constexpr int kRetryAfterSeconds = 1;

  ScoringService(ServiceConfig config, Backends backends);
  ~ScoringService();

  HttpReply score(const std::string& body) const;
  nlohmann::json health(std::chrono::milliseconds probe_timeout = std::chrono::seconds(1)) const;

  void mount(httplib::Server& server) const;

  /// Binds config.listen_host:listen_port (port 0 picks a free one) and serves
  /// until stop(). `on_bound` receives the bound port before serving starts.
  void run(const std::function<void(int)>& on_bound = {});
  void stop();

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  ServiceConfig config_;
  Backends backends_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace nitireward

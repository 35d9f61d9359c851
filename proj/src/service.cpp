#include "nitireward/service.hpp"

#include <httplib.h>

#include <array>

#include "nitireward/error.hpp"
#include "nitireward/json_io.hpp"
#include "parallel.hpp"

namespace nitireward {
namespace {

HttpReply json_reply(int status, const nlohmann::json& body) {
  return HttpReply{status, body.dump(), {}};
}

HttpReply error_reply(ErrorKind kind, const std::string& message) {
  auto reply = json_reply(http_status(kind), error_body(kind, message));
  if (reply.status == 502) {
    reply.headers["Retry-After"] = std::to_string(ScoringService::kRetryAfterSeconds);
  }
  return reply;
}

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  for (const auto& [k, v] : reply.headers) res.set_header(k, v);
  res.set_content(reply.body, "application/json");
}

}  // namespace

int http_status(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input:
    case ErrorKind::InvalidArgument:
      return 400;
    case ErrorKind::Config:
      return 422;
    case ErrorKind::Upstream:
    case ErrorKind::UpstreamReply:
      return 502;
  }
  return 500;
}

nlohmann::json error_body(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", to_string(kind)}, {"message", message}}}};
}

ScoringService::ScoringService(ServiceConfig config, Backends backends)
    : config_(std::move(config)),
      backends_(std::move(backends)),
      server_(std::make_unique<httplib::Server>()) {
  // httplib's default adds SO_REUSEPORT, which lets a second instance share a busy port
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  mount(*server_);
}

ScoringService::~ScoringService() = default;

HttpReply ScoringService::score(const std::string& body) const {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    return error_reply(ErrorKind::Input, std::string("request body is not JSON: ") + e.what());
  }
  try {
    const auto request = score_request_from_json(j);
    const auto response = score_request(request, backends_.scoring_context(config_));
    return json_reply(200, to_json(response));
  } catch (const Error& e) {
    return error_reply(e.kind(), e.what());
  }
}

nlohmann::json ScoringService::health(std::chrono::milliseconds probe_timeout) const {
  struct Upstream {
    const char* name;
    bool present;
    std::string url;
    std::string state;
  };
  std::array<Upstream, 3> ups{{
      {"embedder", backends_.embedder != nullptr, backends_.embedder_url, {}},
      {"judge", backends_.judge != nullptr, backends_.judge_url, {}},
      {"tokenizer", backends_.counter != nullptr, backends_.tokenizer_url, {}},
  }};
  const bool mock = config_.backends == BackendKind::Mock;
  detail::parallel_for(ups.size(), ups.size(), [&](std::size_t i) {
    auto& u = ups[i];
    if (mock) {
      u.state = "mock";
    } else if (u.url.empty()) {
      u.state = "not_configured";
    } else {
      u.state = probe(u.url, probe_timeout) ? "ok" : "unreachable";
    }
  });

  nlohmann::json upstreams = nlohmann::json::object();
  bool degraded = false;
  for (const auto& u : ups) {
    upstreams[u.name] = u.state;
    degraded = degraded || u.state == "unreachable";
  }
  return {{"status", degraded ? "degraded" : "ok"}, {"upstreams", upstreams}};
}

void ScoringService::mount(httplib::Server& server) const {
  server.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, score(req.body));
  });
  server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    send(res, json_reply(200, health()));
  });
}

void ScoringService::run(const std::function<void(int)>& on_bound) {
  int port = config_.listen_port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.listen_host);
  } else if (!server_->bind_to_port(config_.listen_host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw config_error("cannot listen on " + config_.listen_host + ":" +
                       std::to_string(config_.listen_port));
  }
  if (on_bound) on_bound(port);
  server_->listen_after_bind();
}

void ScoringService::stop() { server_->stop(); }

}  // namespace nitireward

#include "nitireward/http_clients.hpp"

#include <httplib.h>

#include "nitireward/error.hpp"
#include "nitireward/json_io.hpp"

namespace nitireward {
namespace {

std::chrono::microseconds to_duration(double seconds) {
  return std::chrono::microseconds(static_cast<std::int64_t>(seconds * 1e6));
}

void set_timeouts(httplib::Client& c, std::chrono::microseconds t) {
  const auto s = std::chrono::duration_cast<std::chrono::seconds>(t);
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(t - s);
  c.set_connection_timeout(s.count(), us.count());
  c.set_read_timeout(s.count(), us.count());
  c.set_write_timeout(s.count(), us.count());
}

}  // namespace

Endpoint parse_endpoint(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme) {
    throw config_error("upstream URL '" + std::string(url) + "' must start with http://");
  }
  const auto slash = url.find('/', scheme.size());
  Endpoint e;
  e.base = std::string(url.substr(0, slash));
  e.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  if (e.base.size() == scheme.size()) throw config_error("upstream URL '" + std::string(url) + "' has no host");
  return e;
}

ConnectionPool::ConnectionPool(std::string base, HttpOptions options)
    : base_(std::move(base)), options_(options) {
  if (options_.max_inflight == 0) throw config_error("max_inflight must be at least 1");
  if (!(options_.timeout_s > 0.0)) throw config_error("upstream timeout must be positive");
}

ConnectionPool::~ConnectionPool() = default;

std::unique_ptr<httplib::Client> ConnectionPool::acquire() {
  std::unique_lock lock(mutex_);
  available_.wait(lock, [&] { return in_use_ < options_.max_inflight; });
  ++in_use_;
  if (!idle_.empty()) {
    auto c = std::move(idle_.back());
    idle_.pop_back();
    return c;
  }
  lock.unlock();
  auto c = std::make_unique<httplib::Client>(base_);
  c->set_keep_alive(true);
  set_timeouts(*c, to_duration(options_.timeout_s));
  return c;
}

void ConnectionPool::release(std::unique_ptr<httplib::Client> client) {
  {
    std::lock_guard lock(mutex_);
    if (client) idle_.push_back(std::move(client));
    --in_use_;
  }
  available_.notify_one();
}

nlohmann::json ConnectionPool::post_json(const std::string& path, const nlohmann::json& body) {
  auto client = acquire();
  httplib::Result res = client->Post(path, body.dump(), "application/json");
  if (!res) {
    release(nullptr);  // drop a connection in an unknown state
    throw upstream_error(base_ + path + ": " + httplib::to_string(res.error()));
  }
  release(std::move(client));

  const int status = res->status;
  if (status == 429 || status >= 500) {
    throw upstream_error(base_ + path + ": HTTP " + std::to_string(status));
  }
  if (status < 200 || status >= 300) {
    throw Error(ErrorKind::UpstreamReply, base_ + path + ": HTTP " + std::to_string(status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::UpstreamReply, base_ + path + ": reply is not JSON: " + e.what());
  }
}

HttpEmbedder::HttpEmbedder(std::string_view url, HttpOptions options)
    : endpoint_(parse_endpoint(url)), pool_(endpoint_.base, options) {}

std::vector<EmbeddingBundle> HttpEmbedder::embed(std::span<const std::string> texts) {
  nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto reply = pool_.post_json(endpoint_.path, body);
  try {
    if (!reply.is_object() || !reply.contains("embeddings") || !reply["embeddings"].is_array()) {
      throw input_error("$.embeddings: expected array");
    }
    const auto& arr = reply["embeddings"];
    if (arr.size() != texts.size()) {
      throw input_error("$.embeddings: " + std::to_string(arr.size()) + " embeddings for " +
                        std::to_string(texts.size()) + " texts");
    }
    std::vector<EmbeddingBundle> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(embedding_from_json(arr[i], "$.embeddings[" + std::to_string(i) + "]"));
    }
    return out;
  } catch (const Error& e) {
    throw Error(ErrorKind::UpstreamReply, "embedder reply: " + std::string(e.what()));
  }
}

HttpJudge::HttpJudge(std::string_view url, JudgeTemplates templates,
                     std::optional<std::string> model, HttpOptions options)
    : endpoint_(parse_endpoint(url)),
      templates_(std::move(templates)),
      model_(std::move(model)),
      pool_(endpoint_.base, options) {}

nlohmann::json HttpJudge::request_body(const std::string& prompt) const {
  nlohmann::json body = {
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", kTemperature},
      {"seed", kSeed},
      {"max_tokens", kMaxTokens},
  };
  if (model_) body["model"] = *model_;
  return body;
}

std::string HttpJudge::ask(const std::string& prompt) {
  const auto reply = pool_.post_json(endpoint_.path, request_body(prompt));
  const auto* content = [&]() -> const nlohmann::json* {
    if (!reply.is_object() || !reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty()) {
      return nullptr;
    }
    const auto& first = reply["choices"][0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) return nullptr;
    const auto& msg = first["message"];
    if (!msg.contains("content") || !msg["content"].is_string()) return nullptr;
    return &msg["content"];
  }();
  if (!content) throw JudgeReplyError("judge reply has no choices[0].message.content", reply.dump());
  return content->get<std::string>();
}

JudgeLabels HttpJudge::judge(const JudgeRequest& request) {
  JudgeLabels labels;
  labels.coverage = read_coverage_reply(ask(render_template(templates_.coverage, request)));
  labels.contradiction =
      read_contradiction_reply(ask(render_template(templates_.contradiction, request)));
  return labels;
}

HttpTokenCounter::HttpTokenCounter(std::string_view url, HttpOptions options)
    : endpoint_(parse_endpoint(url)), pool_(endpoint_.base, options) {}

std::size_t HttpTokenCounter::count(std::string_view text) const {
  const std::string t(text);
  return count_many(std::span(&t, 1)).front();
}

std::vector<std::size_t> HttpTokenCounter::count_many(std::span<const std::string> texts) const {
  nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto reply = pool_.post_json(endpoint_.path, body);
  if (!reply.is_object() || !reply.contains("counts") || !reply["counts"].is_array() ||
      reply["counts"].size() != texts.size()) {
    throw Error(ErrorKind::UpstreamReply, "tokenizer reply: expected " +
                                              std::to_string(texts.size()) + " counts");
  }
  std::vector<std::size_t> out;
  out.reserve(texts.size());
  for (const auto& c : reply["counts"]) {
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0)) {
      throw Error(ErrorKind::UpstreamReply, "tokenizer reply: count " + c.dump() + " is not a count");
    }
    out.push_back(c.get<std::size_t>());
  }
  return out;
}

bool probe(std::string_view url, std::chrono::milliseconds timeout) {
  Endpoint e;
  try {
    e = parse_endpoint(url);
  } catch (const Error&) {
    return false;
  }
  httplib::Client c(e.base);
  set_timeouts(c, timeout);
  return static_cast<bool>(c.Get("/"));
}

}  // namespace nitireward

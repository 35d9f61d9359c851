#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nitireward/embedding.hpp"
#include "nitireward/judge.hpp"
#include "nitireward/prompt_builder.hpp"

namespace httplib {
class Client;
}

namespace nitireward {

// "http://host:port/path" split into the scheme+authority and the path.
struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint parse_endpoint(std::string_view url);  // Error(Config) on anything but http://

struct HttpOptions {
  std::size_t max_inflight = 8;
  double timeout_s = 30.0;
};

/// Keep-alive connections to one upstream, at most max_inflight in use at a
/// time; callers beyond that wait for a free connection.
class ConnectionPool {
 public:
  ConnectionPool(std::string base, HttpOptions options);
  ~ConnectionPool();
  ConnectionPool(const ConnectionPool&) = delete;
  ConnectionPool& operator=(const ConnectionPool&) = delete;

  /// POST a JSON body and decode the JSON reply.
  ///  - Error(Upstream): connection failure, timeout, 429 or 5xx
  ///  - Error(UpstreamReply): other non-2xx status or an unparseable body
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body);

  const std::string& base() const noexcept { return base_; }

 private:
  std::unique_ptr<httplib::Client> acquire();
  void release(std::unique_ptr<httplib::Client> client);

  std::string base_;
  HttpOptions options_;
  std::mutex mutex_;
  std::condition_variable available_;
  std::vector<std::unique_ptr<httplib::Client>> idle_;
  std::size_t in_use_ = 0;
};

/// POST {"texts": [...]} -> {"embeddings": [{dense, sparse, tokens}, ...]}
class HttpEmbedder final : public EmbedderClient {
 public:
  HttpEmbedder(std::string_view url, HttpOptions options = {});
  std::vector<EmbeddingBundle> embed(std::span<const std::string> texts) override;

 private:
  Endpoint endpoint_;
  ConnectionPool pool_;
};

/// Chat-completions style judge: one request per question, sampled at
/// temperature 0.5 with seed 69420; the label is read from
/// choices[0].message.content.
class HttpJudge final : public JudgeClient {
 public:
  static constexpr double kTemperature = 0.5;
  static constexpr std::uint64_t kSeed = 69420;
  static constexpr int kMaxTokens = 2048;

  HttpJudge(std::string_view url, JudgeTemplates templates, std::optional<std::string> model = {},
            HttpOptions options = {});
  JudgeLabels judge(const JudgeRequest& request) override;

  nlohmann::json request_body(const std::string& prompt) const;

 private:
  std::string ask(const std::string& prompt);

  Endpoint endpoint_;
  JudgeTemplates templates_;
  std::optional<std::string> model_;
  ConnectionPool pool_;
};

/// POST {"texts": [...]} -> {"counts": [...]}
class HttpTokenCounter final : public TokenCounter {
 public:
  HttpTokenCounter(std::string_view url, HttpOptions options = {});
  std::size_t count(std::string_view text) const override;
  std::vector<std::size_t> count_many(std::span<const std::string> texts) const override;

 private:
  Endpoint endpoint_;
  mutable ConnectionPool pool_;
};

/// True when anything answers HTTP at the URL's host within `timeout`.
bool probe(std::string_view url, std::chrono::milliseconds timeout = std::chrono::seconds(1));

}  // namespace nitireward

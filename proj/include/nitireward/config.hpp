#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nitireward/answer_rewards.hpp"
#include "nitireward/embedding.hpp"
#include "nitireward/grpo.hpp"
#include "nitireward/http_clients.hpp"
#include "nitireward/judge.hpp"
#include "nitireward/prompt_builder.hpp"
#include "nitireward/rollout_scoring.hpp"

namespace nitireward {

enum class BackendKind { Mock, Http };

struct ServiceConfig {
  RewardMode mode = RewardMode::Semantic;
  BlockOrder order = BlockOrder::ReasoningAnswerCitation;
  HeadWeights weights;
  std::size_t budget = kDefaultTokenBudget;
  std::size_t top_k = kDefaultTopK;
  GrpoConfig grpo;
  BackendKind backends = BackendKind::Mock;
  std::optional<std::string> embedder_url;
  std::optional<std::string> judge_url;
  std::optional<std::string> judge_model;
  std::optional<std::string> tokenizer_url;
  std::optional<std::string> judge_coverage_template;  // file paths
  std::optional<std::string> judge_contradiction_template;
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::size_t max_inflight = 8;
  double upstream_timeout_s = 30.0;

  /// Error(Config) when a value is out of range or the selected mode needs an
  /// HTTP backend whose URL is missing.
  void validate() const;
};

/// Flat key/value settings, one source at a time. Keys are the TOML keys.
using Settings = std::map<std::string, std::string>;

std::vector<std::string> config_keys();

Settings settings_from_toml_file(const std::string& path);
Settings settings_from_toml_string(std::string_view text, const std::string& source = "<string>");

/// NITIREWARD_<KEY> variables from `environ`-style entries ("NAME=value").
Settings settings_from_env(const std::vector<std::string>& environment);
Settings settings_from_process_env();

/// "key=value" pairs given on the command line.
Settings settings_from_flags(const std::vector<std::string>& assignments);

/// Applies layers in order; later layers win. Unknown keys and unparseable
/// values raise Error(Config) naming the key.
ServiceConfig build_config(const std::vector<Settings>& layers_low_to_high);

/// file < env < flags, then validate().
ServiceConfig load_config(const std::optional<std::string>& file,
                          const std::vector<std::string>& flag_assignments);

/// Owned upstream clients selected by a config.
struct Backends {
  std::unique_ptr<EmbedderClient> embedder;
  std::unique_ptr<JudgeClient> judge;
  std::unique_ptr<TokenCounter> counter;
  std::string embedder_url;  // "" for mocks or not configured
  std::string judge_url;
  std::string tokenizer_url;

  ScoringContext scoring_context(const ServiceConfig& config) const;
};

Backends make_backends(const ServiceConfig& config);

}  // namespace nitireward

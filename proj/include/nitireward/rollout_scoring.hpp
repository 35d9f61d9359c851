#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nitireward/answer_rewards.hpp"
#include "nitireward/grpo.hpp"
#include "nitireward/structured_output.hpp"

namespace nitireward {

/// One prompt's rollout group as sent by a trainer. Code lists are kept as
/// sent; they are deduplicated only when scored.
struct ScoreGroup {
  std::string prompt_id;
  std::optional<std::string> question;
  std::vector<LawCode> gold_citations;
  std::vector<LawCode> context_codes;
  std::string reference_answer;
  std::vector<std::string> completions;
  std::optional<std::vector<double>> logp_new;
  std::optional<std::vector<double>> logp_old;
  std::optional<std::vector<double>> logp_ref;

  bool operator==(const ScoreGroup&) const = default;
};

struct ScoreRequest {
  std::optional<RewardMode> mode;   // falls back to the scorer's configured mode
  std::optional<BlockOrder> order;  // likewise
  std::vector<ScoreGroup> groups;

  bool operator==(const ScoreRequest&) const = default;
};

struct GroupScore {
  std::string prompt_id;
  std::vector<RewardBreakdown> rewards;  // aligned with completions
  std::vector<double> advantages;
  std::optional<GrpoLossResult> loss;    // present when logp_new and logp_old were sent
};

struct ScoreResponse {
  RewardMode mode = RewardMode::Semantic;
  BlockOrder order = BlockOrder::ReasoningAnswerCitation;
  std::vector<GroupScore> groups;
};

/// Backends are borrowed; a null client is treated as not configured.
struct ScoringContext {
  RewardMode mode = RewardMode::Semantic;
  BlockOrder order = BlockOrder::ReasoningAnswerCitation;
  HeadWeights weights;
  GrpoConfig grpo;
  EmbedderClient* embedder = nullptr;
  JudgeClient* judge = nullptr;
  std::size_t max_parallel = 1;  // concurrent judge calls per group
};

/// Scores a single completion against its group's references. When the
/// format gate fails the answer components are zero and no upstream call is
/// made.
RewardBreakdown score_completion(std::string_view completion, const ScoreGroup& group,
                                 RewardMode mode, BlockOrder order, const ScoringContext& ctx);

/// Scores every completion, then normalises each group's totals into
/// advantages. Any upstream failure aborts the whole batch.
///  - Error(Config): the mode needs a backend that is not configured
///  - Error(InvalidArgument): a group has fewer than two completions or
///    misaligned log-probabilities
ScoreResponse score_request(const ScoreRequest& request, const ScoringContext& ctx);

}  // namespace nitireward

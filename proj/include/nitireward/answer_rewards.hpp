#pragma once

#include <optional>
#include <string_view>

#include "nitireward/citation_rewards.hpp"
#include "nitireward/embedding.hpp"
#include "nitireward/judge.hpp"

namespace nitireward {

enum class RewardMode {
  Semantic,      // citation cascade + embedding similarity
  CovCon,        // citation cascade + judge coverage + judge consistency
  Combined,      // naive sum of all of the above
  CitationOnly,  // citation cascade alone
};

std::string_view to_string(RewardMode mode) noexcept;
std::optional<RewardMode> parse_reward_mode(std::string_view name) noexcept;

bool needs_embedder(RewardMode mode) noexcept;
bool needs_judge(RewardMode mode) noexcept;

// Upper bound of total_reward in `mode`, from the component maxima.
double max_total_reward(RewardMode mode) noexcept;

double coverage_reward(CoverageLabel label) noexcept;        // 0 / 0.5 / 1
double consistency_reward(ContradictionLabel label) noexcept;  // 1 iff no contradiction
double contradiction_score(ContradictionLabel label) noexcept; // 1 - consistency_reward

/// Multi-head similarity between generated and reference answers. Zero
/// without calling the embedder when the format gate failed.
double semantic_reward(std::string_view generated, std::string_view reference,
                       EmbedderClient& embedder, const HeadWeights& weights, bool format_pass);

struct AnswerComponents {
  std::optional<double> semantic;
  std::optional<double> coverage;
  std::optional<double> consistency;
};

struct RewardBreakdown {
  CitationRewardBreakdown citation;
  std::optional<double> semantic;
  std::optional<double> coverage;
  std::optional<double> consistency;
  double total = 0.0;
};

/// Adds the components `mode` asks for to the citation subtotal; the
/// breakdown keeps only those components. Throws Error(Config) when one of
/// them is missing.
RewardBreakdown total_reward(RewardMode mode, const CitationRewardBreakdown& citation,
                             const AnswerComponents& answer);

}  // namespace nitireward

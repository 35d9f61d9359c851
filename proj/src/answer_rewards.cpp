#include "nitireward/answer_rewards.hpp"

#include <array>
#include <string>

#include "nitireward/error.hpp"

namespace nitireward {
namespace {

double require(const std::optional<double>& value, RewardMode mode, const char* name) {
  if (!value) {
    throw config_error(std::string("reward mode '") + std::string(to_string(mode)) +
                       "' requires the " + name + " component");
  }
  return *value;
}

}  // namespace

std::string_view to_string(RewardMode mode) noexcept {
  switch (mode) {
    case RewardMode::Semantic:
      return "semantic";
    case RewardMode::CovCon:
      return "covcon";
    case RewardMode::Combined:
      return "combined";
    case RewardMode::CitationOnly:
      return "citation_only";
  }
  return "semantic";
}

std::optional<RewardMode> parse_reward_mode(std::string_view name) noexcept {
  for (auto mode : {RewardMode::Semantic, RewardMode::CovCon, RewardMode::Combined,
                    RewardMode::CitationOnly}) {
    if (name == to_string(mode)) return mode;
  }
  return std::nullopt;
}

bool needs_embedder(RewardMode mode) noexcept {
  return mode == RewardMode::Semantic || mode == RewardMode::Combined;
}

bool needs_judge(RewardMode mode) noexcept {
  return mode == RewardMode::CovCon || mode == RewardMode::Combined;
}

double max_total_reward(RewardMode mode) noexcept {
  // format 1.0 + non-hallucination 0.5 + citation F1 1.0
  double total = 1.0 + kNonHallucinationReward + 1.0;
  if (needs_embedder(mode)) total += 1.0;
  if (needs_judge(mode)) total += coverage_reward(CoverageLabel::Full) +
                                  consistency_reward(ContradictionLabel::NoContradiction);
  return total;
}

double coverage_reward(CoverageLabel label) noexcept {
  switch (label) {
    case CoverageLabel::None:
      return 0.0;
    case CoverageLabel::Partial:
      return 0.5;
    case CoverageLabel::Full:
      return 1.0;
  }
  return 0.0;
}

double consistency_reward(ContradictionLabel label) noexcept {
  return label == ContradictionLabel::NoContradiction ? 1.0 : 0.0;
}

double contradiction_score(ContradictionLabel label) noexcept {
  return label == ContradictionLabel::Contradicts ? 1.0 : 0.0;
}

double semantic_reward(std::string_view generated, std::string_view reference,
                       EmbedderClient& embedder, const HeadWeights& weights, bool format_pass) {
  if (!format_pass) return 0.0;
  const std::array<std::string, 2> texts{std::string(generated), std::string(reference)};
  const auto bundles = embedder.embed(texts);
  if (bundles.size() != texts.size()) {
    throw Error(ErrorKind::UpstreamReply, "embedder returned " + std::to_string(bundles.size()) +
                                              " embeddings for 2 texts");
  }
  return multi_head_similarity(bundles[0], bundles[1], weights);
}

RewardBreakdown total_reward(RewardMode mode, const CitationRewardBreakdown& citation,
                             const AnswerComponents& answer) {
  RewardBreakdown out;
  out.citation = citation;
  out.total = citation.subtotal;
  if (needs_embedder(mode)) {
    out.semantic = require(answer.semantic, mode, "semantic");
    out.total += *out.semantic;
  }
  if (needs_judge(mode)) {
    out.coverage = require(answer.coverage, mode, "coverage");
    out.consistency = require(answer.consistency, mode, "consistency");
    out.total += *out.coverage + *out.consistency;
  }
  return out;
}

}  // namespace nitireward

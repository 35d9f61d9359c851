#include "nitireward/rollout_scoring.hpp"

#include "nitireward/citation_rewards.hpp"
#include "nitireward/error.hpp"
#include "parallel.hpp"

namespace nitireward {
namespace {

void require_backends(RewardMode mode, const ScoringContext& ctx) {
  if (needs_embedder(mode) && ctx.embedder == nullptr) {
    throw config_error("reward mode '" + std::string(to_string(mode)) +
                       "' needs an embedder, none is configured");
  }
  if (needs_judge(mode) && ctx.judge == nullptr) {
    throw config_error("reward mode '" + std::string(to_string(mode)) +
                       "' needs a judge, none is configured");
  }
}

void check_group(const ScoreGroup& g) {
  if (g.completions.size() < 2) {
    throw invalid_argument("group '" + g.prompt_id + "' has " +
                           std::to_string(g.completions.size()) +
                           " completions; at least 2 are needed");
  }
  auto check = [&](const std::optional<std::vector<double>>& v, const char* name) {
    if (v && v->size() != g.completions.size()) {
      throw invalid_argument("group '" + g.prompt_id + "': " + name + " has " +
                             std::to_string(v->size()) + " entries for " +
                             std::to_string(g.completions.size()) + " completions");
    }
  };
  check(g.logp_new, "logp_new");
  check(g.logp_old, "logp_old");
  check(g.logp_ref, "logp_ref");
  if (g.logp_new.has_value() != g.logp_old.has_value()) {
    throw invalid_argument("group '" + g.prompt_id + "': logp_new and logp_old go together");
  }
}

const std::string& question_of(const ScoreGroup& g) {
  static const std::string empty;
  return g.question ? *g.question : empty;
}

struct ParsedCompletion {
  ParseResult parse;
  CitationRewardBreakdown citation;
};

ParsedCompletion parse_and_cite(std::string_view completion, const ScoreGroup& group,
                                BlockOrder order) {
  ParsedCompletion out{parse_response(completion, order), {}};
  out.citation = citation_cascade(out.parse, to_code_set(group.context_codes),
                                  to_code_set(group.gold_citations));
  return out;
}

AnswerComponents judge_components(const JudgeLabels& labels) {
  AnswerComponents c;
  c.coverage = coverage_reward(labels.coverage);
  c.consistency = consistency_reward(labels.contradiction);
  return c;
}

// Zero answer components for a completion whose format gate failed.
AnswerComponents gated_components(RewardMode mode) {
  AnswerComponents c;
  if (needs_embedder(mode)) c.semantic = 0.0;
  if (needs_judge(mode)) {
    c.coverage = 0.0;
    c.consistency = 0.0;
  }
  return c;
}

}  // namespace

RewardBreakdown score_completion(std::string_view completion, const ScoreGroup& group,
                                 RewardMode mode, BlockOrder order, const ScoringContext& ctx) {
  require_backends(mode, ctx);
  const auto pc = parse_and_cite(completion, group, order);
  if (!pc.citation.format_pass) return total_reward(mode, pc.citation, gated_components(mode));

  const std::string& answer = pc.parse.response->answer;
  AnswerComponents comp;
  if (needs_judge(mode)) {
    comp = judge_components(
        judge_labels(question_of(group), answer, group.reference_answer, *ctx.judge));
  }
  if (needs_embedder(mode)) {
    comp.semantic = semantic_reward(answer, group.reference_answer, *ctx.embedder, ctx.weights, true);
  }
  return total_reward(mode, pc.citation, comp);
}

ScoreResponse score_request(const ScoreRequest& request, const ScoringContext& ctx) {
  ScoreResponse response;
  response.mode = request.mode.value_or(ctx.mode);
  response.order = request.order.value_or(ctx.order);
  require_backends(response.mode, ctx);
  ctx.grpo.validate();
  for (const auto& g : request.groups) check_group(g);

  const RewardMode mode = response.mode;
  for (const auto& group : request.groups) {
    const std::size_t n = group.completions.size();
    std::vector<ParsedCompletion> parsed;
    parsed.reserve(n);
    for (const auto& c : group.completions) parsed.push_back(parse_and_cite(c, group, response.order));

    std::vector<AnswerComponents> components(n, gated_components(mode));
    std::vector<std::size_t> passing;
    for (std::size_t i = 0; i < n; ++i) {
      if (parsed[i].citation.format_pass) passing.push_back(i);
    }

    if (needs_judge(mode)) {
      detail::parallel_for(passing.size(), ctx.max_parallel, [&](std::size_t j) {
        const auto i = passing[j];
        const auto labels = judge_labels(question_of(group), parsed[i].parse.response->answer,
                                         group.reference_answer, *ctx.judge);
        components[i] = judge_components(labels);
      });
    }

    if (needs_embedder(mode) && !passing.empty()) {
      // one embedder call per group: passing answers, then the reference
      std::vector<std::string> texts;
      texts.reserve(passing.size() + 1);
      for (auto i : passing) texts.push_back(parsed[i].parse.response->answer);
      texts.push_back(group.reference_answer);
      const auto bundles = ctx.embedder->embed(texts);
      if (bundles.size() != texts.size()) {
        throw Error(ErrorKind::UpstreamReply,
                    "embedder returned " + std::to_string(bundles.size()) + " embeddings for " +
                        std::to_string(texts.size()) + " texts");
      }
      for (std::size_t j = 0; j < passing.size(); ++j) {
        components[passing[j]].semantic =
            multi_head_similarity(bundles[j], bundles.back(), ctx.weights);
      }
    }

    GroupScore gs;
    gs.prompt_id = group.prompt_id;
    std::vector<double> totals;
    totals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      gs.rewards.push_back(total_reward(mode, parsed[i].citation, components[i]));
      totals.push_back(gs.rewards.back().total);
    }
    gs.advantages = group_advantages(totals, ctx.grpo.std_floor);
    if (group.logp_new && group.logp_old) {
      RolloutGroup rg{group.prompt_id, totals, group.logp_new, group.logp_old, group.logp_ref};
      gs.loss = grpo_loss(rg, ctx.grpo);
    }
    response.groups.push_back(std::move(gs));
  }
  return response;
}

}  // namespace nitireward

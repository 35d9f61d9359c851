#include "nitireward/toy_bandit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nitireward/error.hpp"
#include "nitireward/grpo.hpp"
#include "nitireward/rollout_scoring.hpp"

namespace nitireward {
namespace {

constexpr std::size_t kMaxActions = 64;

std::size_t sample_index(std::span<const double> probs, std::mt19937_64& rng) {
  const double u = double(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.size() - 1;
}

double expected_value(std::span<const double> probs, std::span<const double> values) {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) s += probs[i] * values[i];
  return s;
}

}  // namespace

ToyBanditSpec ToyBanditSpec::citation_bandit() {
  ToyBanditSpec spec;
  spec.question = "How does a director of a limited company resign?";
  spec.reference_answer =
      "A director may resign by giving written notice to the company; the resignation takes "
      "effect from the date the notice reaches the company.";
  spec.gold = make_code_set({2, 5});
  spec.context = make_code_set({1, 2, 3, 4, 5});

  const std::string& ref = spec.reference_answer;
  spec.actions = {
      {make_code_set({2, 5}), ref, std::nullopt},
      {make_code_set({2}), "A director may resign by written notice to the company.", std::nullopt},
      {make_code_set({1, 2, 5}), "Directors resign by notice; the company must register it.",
       std::nullopt},
      {make_code_set({3}), "A director can only be removed by a shareholder resolution.",
       std::nullopt},
      {make_code_set({}), "I am not sure which section applies.", std::nullopt},
      {make_code_set({2, 9}), ref, std::nullopt},
      {make_code_set({4, 5}), "The resignation must be approved by the board of directors.",
       std::nullopt},
      {{}, {}, std::string("A director may resign by giving written notice. Sections 2 and 5.")},
  };
  return spec;
}

void ToyBanditSpec::validate() const {
  if (actions.empty() || actions.size() > kMaxActions) {
    throw invalid_argument("bandit needs 1.." + std::to_string(kMaxActions) + " actions");
  }
  if (!(learning_rate >= 0.0)) throw invalid_argument("learning rate must be non-negative");
  if (iterations < 0) throw invalid_argument("iterations must be non-negative");
  if (group_size < 2) throw invalid_argument("group size must be at least 2");
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void policy_gradient_step(std::vector<double>& logits, std::span<const std::size_t> actions,
                          std::span<const double> advantages, double learning_rate) {
  if (actions.size() != advantages.size()) {
    throw invalid_argument("actions and advantages differ in length");
  }
  const auto probs = softmax(logits);
  std::vector<double> grad(logits.size(), 0.0);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double a = advantages[i];
    if (a == 0.0) continue;
    for (std::size_t k = 0; k < logits.size(); ++k) grad[k] -= a * probs[k];
    grad[actions[i]] += a;
  }
  for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += learning_rate * grad[k];
}

std::vector<double> score_bandit_actions(const ToyBanditSpec& spec, EmbedderClient& embedder,
                                         JudgeClient& judge, const HeadWeights& weights) {
  ScoreGroup group;
  group.prompt_id = "toy-bandit";
  group.question = spec.question;
  group.gold_citations.assign(spec.gold.begin(), spec.gold.end());
  group.context_codes.assign(spec.context.begin(), spec.context.end());
  group.reference_answer = spec.reference_answer;

  ScoringContext ctx;
  ctx.mode = spec.mode;
  ctx.order = spec.order;
  ctx.weights = weights;
  ctx.embedder = &embedder;
  ctx.judge = &judge;

  std::vector<double> rewards;
  rewards.reserve(spec.actions.size());
  for (const auto& action : spec.actions) {
    std::string completion;
    if (action.raw_completion) {
      completion = *action.raw_completion;
    } else {
      ParsedResponse r;
      r.reasoning = "The question concerns director resignation.";
      r.answer = action.answer;
      r.citations.assign(action.citations.begin(), action.citations.end());
      r.order = spec.order;
      completion = render_response(r);
    }
    rewards.push_back(score_completion(completion, group, spec.mode, spec.order, ctx).total);
  }
  return rewards;
}

ToyTrainResult train_toy_bandit(const ToyBanditSpec& spec, EmbedderClient& embedder,
                                JudgeClient& judge, const HeadWeights& weights) {
  spec.validate();

  ToyTrainResult result;
  result.action_rewards = score_bandit_actions(spec, embedder, judge, weights);
  result.max_reward = *std::max_element(result.action_rewards.begin(), result.action_rewards.end());

  std::mt19937_64 rng(spec.seed);
  std::vector<double> logits(spec.actions.size(), 0.0);

  auto record = [&](int iteration) {
    const auto probs = softmax(logits);
    result.curve.push_back({iteration, expected_value(probs, result.action_rewards), entropy(probs)});
  };
  record(0);

  std::vector<std::size_t> sampled(static_cast<std::size_t>(spec.group_size));
  std::vector<double> rewards(sampled.size());
  for (int it = 1; it <= spec.iterations; ++it) {
    const auto probs = softmax(logits);
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      sampled[i] = sample_index(probs, rng);
      rewards[i] = result.action_rewards[sampled[i]];
    }
    const auto adv = group_advantages(rewards);
    policy_gradient_step(logits, sampled, adv, spec.learning_rate);
    record(it);
  }
  result.final_policy = softmax(logits);
  return result;
}

}  // namespace nitireward

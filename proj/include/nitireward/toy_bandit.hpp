#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nitireward/answer_rewards.hpp"
#include "nitireward/structured_output.hpp"

namespace nitireward {

/// One arm of the bandit: the completion the policy emits when it picks it.
/// Without `raw_completion` the arm renders a well-formed response from
/// `citations` and `answer`.
struct BanditAction {
  CodeSet citations;
  std::string answer;
  std::optional<std::string> raw_completion;
};

struct ToyBanditSpec {
  std::vector<BanditAction> actions;  // at most 64
  CodeSet gold;
  CodeSet context;
  std::string question;
  std::string reference_answer;
  RewardMode mode = RewardMode::Semantic;
  BlockOrder order = BlockOrder::ReasoningAnswerCitation;
  double learning_rate = 0.1;
  int iterations = 200;
  int group_size = 10;
  std::uint64_t seed = 69420;

  /// Eight-arm citation bandit over codes 1..5 with gold {2, 5}; one arm
  /// cites the gold set with the reference answer.
  static ToyBanditSpec citation_bandit();

  void validate() const;
};

struct CurvePoint {
  int iteration = 0;
  double expected_reward = 0.0;
  double entropy = 0.0;
};

struct ToyTrainResult {
  std::vector<CurvePoint> curve;  // iteration 0 is the initial uniform policy
  std::vector<double> action_rewards;
  std::vector<double> final_policy;
  double max_reward = 0.0;  // best single-arm reward
};

std::vector<double> softmax(std::span<const double> logits);
double entropy(std::span<const double> probs);

/// logits += lr * sum_i a_i * (onehot(action_i) - softmax(logits))
void policy_gradient_step(std::vector<double>& logits, std::span<const std::size_t> actions,
                          std::span<const double> advantages, double learning_rate);

/// Scores each arm's completion through the full reward pipeline.
std::vector<double> score_bandit_actions(const ToyBanditSpec& spec, EmbedderClient& embedder,
                                         JudgeClient& judge, const HeadWeights& weights);

/// Softmax policy trained with group-normalised advantages. Deterministic
/// for a given seed: sampling uses mt19937_64 with an explicit inverse CDF.
ToyTrainResult train_toy_bandit(const ToyBanditSpec& spec, EmbedderClient& embedder,
                                JudgeClient& judge, const HeadWeights& weights = {});

}  // namespace nitireward

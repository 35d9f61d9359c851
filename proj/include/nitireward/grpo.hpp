#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nitireward {

struct GrpoConfig {
  double clip_epsilon = 0.2;
  double kl_beta = 0.0;
  double std_floor = 1e-8;
  int group_size = 10;

  void validate() const;
};

/// G rollouts sampled for one prompt. Log-probabilities are sequence-level,
/// one scalar per rollout.
struct RolloutGroup {
  std::string prompt_id;
  std::vector<double> rewards;
  std::optional<std::vector<double>> logp_new;
  std::optional<std::vector<double>> logp_old;
  std::optional<std::vector<double>> logp_ref;
};

/// a_i = (r_i - mean) / max(std, floor) with the population std; all zero
/// when std < floor.
///
/// Deviations are formed as n*r_i - sum(r) before any division, so groups
/// whose values are exactly representable give bit-identical advantages
/// under a representable shift, or under scaling by a power of two.
std::vector<double> group_advantages(std::span<const double> rewards, double std_floor = 1e-8);

// min(ratio * a, clip(ratio, 1 - eps, 1 + eps) * a)
double clipped_surrogate(double ratio, double advantage, double clip_epsilon) noexcept;

// exp(ref - new) - (ref - new) - 1
double kl_estimate(double logp_new, double logp_ref) noexcept;

struct GrpoLossResult {
  double loss = 0.0;
  std::vector<double> advantages;
  std::vector<double> ratios;
  std::vector<bool> clipped;  // clipped branch strictly smaller than the unclipped one
  std::vector<double> kl;
};

/// loss = -mean(surrogate_i) + kl_beta * mean(kl_i); kl_i is 0 without logp_ref.
/// Throws Error(InvalidArgument) when logp_new / logp_old are missing or
/// misaligned with the rewards.
GrpoLossResult grpo_loss(const RolloutGroup& group, const GrpoConfig& cfg);

}  // namespace nitireward

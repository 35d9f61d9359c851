#include "nitireward/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "nitireward/error.hpp"

namespace nitireward {

void GrpoConfig::validate() const {
  if (!(clip_epsilon > 0.0)) throw config_error("clip_epsilon must be positive");
  if (!(kl_beta >= 0.0)) throw config_error("kl_beta must be non-negative");
  if (!(std_floor > 0.0)) throw config_error("std_floor must be positive");
  if (group_size < 2) throw config_error("group_size must be at least 2");
}

std::vector<double> group_advantages(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) {
    throw invalid_argument("advantage normalisation needs at least 2 rewards, got " +
                           std::to_string(rewards.size()));
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) throw invalid_argument("reward is not finite");
  }

  const double n = double(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;

  // d_i = n * (r_i - mean); std = sqrt(sum(d^2) / n) / n
  std::vector<double> dev(rewards.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    dev[i] = n * rewards[i] - sum;
    sq += dev[i] * dev[i];
  }
  const double scaled_std = std::sqrt(sq / n);

  std::vector<double> adv(rewards.size(), 0.0);
  if (scaled_std / n < std_floor) return adv;
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = dev[i] / scaled_std;
  return adv;
}

double clipped_surrogate(double ratio, double advantage, double clip_epsilon) noexcept {
  const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_estimate(double logp_new, double logp_ref) noexcept {
  const double d = logp_ref - logp_new;
  return std::exp(d) - d - 1.0;
}

GrpoLossResult grpo_loss(const RolloutGroup& group, const GrpoConfig& cfg) {
  const auto g = group.rewards.size();
  if (!group.logp_new || !group.logp_old) {
    throw invalid_argument("grpo_loss needs logp_new and logp_old for group '" + group.prompt_id +
                           "'");
  }
  auto check_len = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != g) {
      throw invalid_argument(std::string(name) + " has " + std::to_string(v.size()) +
                             " entries for " + std::to_string(g) + " rewards");
    }
  };
  check_len(*group.logp_new, "logp_new");
  check_len(*group.logp_old, "logp_old");
  if (group.logp_ref) check_len(*group.logp_ref, "logp_ref");

  GrpoLossResult out;
  out.advantages = group_advantages(group.rewards, cfg.std_floor);
  out.ratios.resize(g);
  out.clipped.resize(g);
  out.kl.assign(g, 0.0);

  double surrogate_sum = 0.0;
  double kl_sum = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double ratio = std::exp((*group.logp_new)[i] - (*group.logp_old)[i]);
    const double a = out.advantages[i];
    const double term = clipped_surrogate(ratio, a, cfg.clip_epsilon);
    out.ratios[i] = ratio;
    out.clipped[i] = term < ratio * a;
    surrogate_sum += term;
    if (group.logp_ref) {
      out.kl[i] = kl_estimate((*group.logp_new)[i], (*group.logp_ref)[i]);
      kl_sum += out.kl[i];
    }
  }
  out.loss = -surrogate_sum / double(g) + cfg.kl_beta * (kl_sum / double(g));
  return out;
}

}  // namespace nitireward

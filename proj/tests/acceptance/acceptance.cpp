// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "nitireward/citation_rewards.hpp"
#include "nitireward/eval.hpp"
#include "nitireward/grpo.hpp"
#include "nitireward/prompt_builder.hpp"
#include "nitireward/retrieval.hpp"
#include "nitireward/rollout_scoring.hpp"
#include "nitireward/structured_output.hpp"
#include "nitireward/toy_bandit.hpp"
#include "support/generators.hpp"
#include "support/table1.hpp"

using namespace nitireward;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream time;
  time.precision(3);
  time << std::fixed << secs << "s";
  if (limit_s > 0 && secs >= limit_s) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the time limit");
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %s  %s\n", o.pass ? "PASS" : "FAIL", name, time.str().c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

Outcome table_joint() {
  int rows = 0;
  double worst = 0.0;
  for (const auto& r : testing::table1()) {
    if (!r.open_model) continue;
    ++rows;
    worst = std::max(worst, std::abs(joint_score(r.f1, r.coverage, r.consistency) - r.joint));
  }
  return {rows == 24 && worst <= 5e-4,
          std::to_string(rows) + " rows, max |joint - printed| = " + num(worst, 6) + " (tol 5e-4)"};
}

Outcome table_gains() {
  const testing::TableRow* base = nullptr;
  int checked = 0;
  std::vector<std::string> off;
  double worst = 0.0;
  for (const auto& r : testing::table1()) {
    if (!r.open_model) continue;
    if (r.base) {
      base = &r;
      continue;
    }
    const std::pair<const char*, std::array<double, 3>> cells[] = {
        {"f1", {base->f1, r.f1, r.f1_gain}},
        {"coverage", {base->coverage, r.coverage, r.coverage_gain}},
        {"consistency", {base->consistency, r.consistency, r.consistency_gain}},
        {"joint", {base->joint, r.joint, r.joint_gain}},
    };
    for (const auto& [metric, v] : cells) {
      ++checked;
      const double err = std::abs(gains_pct(v[0], v[1]) - v[2]);
      worst = std::max(worst, err);
      if (err > 0.1) {
        off.push_back(std::string(r.dataset) + " '" + r.model + "' " + metric + ": printed " + num(v[2], 2) +
                      ", computed " + num(gains_pct(v[0], v[1]), 2));
      }
    }
  }
  std::string detail = std::to_string(checked) + " gain cells, " + std::to_string(off.size()) + " outside 0.1 pp";
  for (const auto& o : off) detail += "; " + o;
  if (off.empty()) detail += ", max err " + num(worst, 3) + " pp";
  return {checked == 72 && off.empty(), detail};
}

Outcome f1_oracle() {
  int mismatches = 0;
  for (unsigned a = 0; a < 32; ++a) {
    for (unsigned b = 0; b < 32; ++b) {
      CodeSet cited, gold;
      for (unsigned i = 0; i < 5; ++i) {
        if (a >> i & 1) cited.insert(LawCode{i + 1});
        if (b >> i & 1) gold.insert(LawCode{i + 1});
      }
      const int tp = std::popcount(a & b);
      const double expected = tp == 0 ? 0.0 : 2.0 * tp / double(std::popcount(a) + std::popcount(b));
      if (citation_f1(cited, gold).f1 != expected) ++mismatches;
    }
  }
  return {mismatches == 0, "1024 pairs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome gating() {
  testing::Rng rng(1001);
  int violations = 0, f1_positive = 0, garbled = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto order = rng.chance(0.5) ? BlockOrder::ReasoningAnswerCitation : BlockOrder::ReasoningCitationAnswer;
    const auto response = testing::random_response(rng, order);
    std::string text = render_response(response);
    if (rng.chance(0.5)) {
      text = testing::garble(rng, text);
      ++garbled;
    }
    const auto parsed = parse_response(text, order);
    // context and gold drawn around the emitted codes so every gate outcome occurs
    auto context = testing::random_code_set(rng, 8, 0.5);
    auto gold = testing::random_code_set(rng, 8, 0.2);
    for (const auto& c : response.citations) {
      if (rng.chance(0.8)) context.insert(c);
      if (rng.chance(0.4)) gold.insert(c);
    }
    const auto b = citation_cascade(parsed, context, gold);
    const bool full_parse = parsed.response.has_value() && parsed.diagnostics.passed();
    if (b.non_hallucination > 0.0 && !full_parse) ++violations;
    if (b.citation_f1 > 0.0 && !(b.format_pass && b.halluc_pass)) ++violations;
    if (b.citation_f1 > 0.0) ++f1_positive;
    if (b.subtotal > 2.5) ++violations;
  }
  return {violations == 0 && f1_positive > 0,
          "10000 outputs (" + std::to_string(garbled) + " garbled, " + std::to_string(f1_positive) +
              " with F1 > 0), " + std::to_string(violations) + " violations"};
}

Outcome advantages() {
  testing::Rng rng(1002);
  double worst_mean = 0.0, worst_std = 0.0;
  int constant_bad = 0, invariance_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> r(10);
    for (auto& x : r) x = rng.uniform(-5.0, 5.0);
    const auto a = group_advantages(r);
    const double m = std::accumulate(a.begin(), a.end(), 0.0) / 10.0;
    double v = 0.0;
    for (double x : a) v += (x - m) * (x - m);
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_std = std::max(worst_std, std::abs(std::sqrt(v / 10.0) - 1.0));

    const auto c = group_advantages(std::vector<double>(10, rng.uniform(-5.0, 5.0)));
    if (c != std::vector<double>(10, 0.0)) ++constant_bad;

    // rewards on the cascade's 1/8 grid; power-of-two scales keep every step exact
    std::vector<double> d(10), moved(10);
    const double shift = double(rng.between(-64, 64)) / 4.0;
    const double scale = std::ldexp(1.0, int(rng.between(-6, 6)));
    for (std::size_t i = 0; i < 10; ++i) {
      d[i] = double(rng.between(0, 44)) / 8.0;
      moved[i] = d[i] * scale + shift;
    }
    if (group_advantages(d) != group_advantages(moved)) ++invariance_bad;
  }
  const bool ok = worst_mean <= 1e-9 && worst_std <= 1e-9 && constant_bad == 0 && invariance_bad == 0;
  std::ostringstream os;
  os.precision(2);
  os << "1000 groups: max|mean| " << std::scientific << worst_mean << ", max|std-1| " << worst_std
     << ", constant failures " << constant_bad << ", shift/scale mismatches " << invariance_bad;
  return {ok, os.str()};
}

Outcome toy_grpo() {
  HashNgramEmbedder embedder;
  MockJudge judge;
  const auto spec = ToyBanditSpec::citation_bandit();
  const auto res = train_toy_bandit(spec, embedder, judge, HeadWeights());
  const double final_reward = res.curve.back().expected_reward;
  // rolling 10-iteration mean must never decrease
  int drops = 0;
  std::vector<double> rolled;
  for (std::size_t i = 9; i < res.curve.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = i - 9; j <= i; ++j) s += res.curve[j].expected_reward;
    rolled.push_back(s / 10.0);
  }
  for (std::size_t i = 1; i < rolled.size(); ++i) drops += rolled[i] < rolled[i - 1];
  const bool ok = spec.actions.size() == 8 && spec.seed == 69420 && res.curve.size() == 201 &&
                  final_reward >= 0.9 * res.max_reward && drops == 0;
  return {ok, "final " + num(final_reward) + " of max " + num(res.max_reward) + " (" +
                  num(100.0 * final_reward / res.max_reward, 1) + "%), smoothed drops " + std::to_string(drops)};
}

Outcome prompt_builder() {
  testing::Rng rng(1003);
  const HeuristicTokenCounter counter;
  int built = 0, refused = 0, violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 10 + rng.index(21);
    std::vector<PromptSection> corpus;
    for (std::size_t i = 0; i < n; ++i) {
      // 50..3000 tokens under the 3-bytes-per-token counter
      const auto tokens = std::size_t(rng.between(50, 3000));
      corpus.push_back({LawCode{i + 1}, std::string(tokens * 3, 'a' + char(i % 26))});
    }
    CodeSet gold;
    for (auto g = 1 + rng.index(4); g > 0; --g) gold.insert(LawCode{1 + rng.index(n)});
    std::vector<PromptSection> gold_texts;
    for (const auto& s : corpus) {
      if (gold.count(s.code)) gold_texts.push_back(s);
    }
    auto ranked = corpus;
    std::shuffle(ranked.begin(), ranked.end(), rng.engine());
    if (rng.chance(0.3)) {  // retriever missed some gold
      std::erase_if(ranked, [&](const PromptSection& s) { return gold.count(s.code) && rng.chance(0.5); });
    }
    const bool gold_overflows = counter.count(render_prompt("question?", gold_texts)) > 8192;
    try {
      const auto b = build_prompt("question?", ranked, gold, gold_texts, counter, 8192, 10);
      ++built;
      const std::set<LawCode> inc(b.included_codes.begin(), b.included_codes.end());
      if (b.token_count > 8192 || !std::includes(inc.begin(), inc.end(), gold.begin(), gold.end()) ||
          b.included_codes.size() > 10 || gold_overflows) {
        ++violations;
      }
    } catch (const BudgetError& e) {
      ++refused;
      if (!gold_overflows || e.reason() != BudgetError::Reason::Gold) ++violations;
    }
  }
  return {violations == 0 && built > 0 && refused > 0,
          "1000 corpora: " + std::to_string(built) + " built, " + std::to_string(refused) +
              " gold-overflow errors, " + std::to_string(violations) + " violations"};
}

Outcome fusion() {
  const double hand = fuse(HeadScores{1.0, 0.5, 0.5}, HeadWeights(0.4, 0.2, 0.4));
  testing::Rng rng(1004);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<CorpusSection> corpus;
    for (std::size_t i = 0; i < n; ++i) corpus.push_back({LawCode{rng.index(1000) * 1000 + i}, "", testing::random_bundle(rng)});
    if (n > 2) corpus[1].embedding = corpus[0].embedding;  // force a tie
    const auto q = testing::random_bundle(rng);
    const std::size_t k = 1 + rng.index(n + 5);
    std::vector<std::pair<double, LawCode>> all;
    for (const auto& s : corpus) all.emplace_back(multi_head_similarity(q, s.embedding, HeadWeights()), s.code);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto hits = retrieve_topk(q, corpus, k, HeadWeights());
    if (hits.size() != std::min(k, n)) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i].code != all[i].second || hits[i].fused != all[i].first) {
        ++mismatches;
        break;
      }
    }
  }
  return {hand == 0.7 && mismatches == 0,
          std::string("hand example ") + (hand == 0.7 ? "== 0.7 bit-exact" : num(hand, 17) + " != 0.7") +
              ", 200 corpora, " + std::to_string(mismatches) + " mismatches"};
}

Outcome round_trip() {
  testing::Rng rng(1005);
  int bad = 0;
  for (auto order : {BlockOrder::ReasoningAnswerCitation, BlockOrder::ReasoningCitationAnswer}) {
    for (int t = 0; t < 1000; ++t) {
      const auto r = testing::random_response(rng, order);
      const auto parsed = parse_response(render_response(r), order);
      if (!parsed.response || !(*parsed.response == r) || !parsed.diagnostics.passed()) ++bad;
    }
  }
  return {bad == 0, "2000 values (1000 per order), " + std::to_string(bad) + " mismatches"};
}

// Every text maps to the same exact unit bundle, so the semantic head is
// exactly 1. The hash embedder's normalised vectors land a few ulp short.
class UnitEmbedder final : public EmbedderClient {
 public:
  std::vector<EmbeddingBundle> embed(std::span<const std::string> texts) override {
    EmbeddingBundle b;
    b.dense = {1.0, 0.0};
    b.sparse = {{7, 1.0}};
    b.tokens = {{0.0, 1.0}};
    return std::vector<EmbeddingBundle>(texts.size(), b);
  }
};

Outcome mode_bounds() {
  UnitEmbedder embedder;
  MockJudge judge;
  ScoringContext ctx;
  ctx.embedder = &embedder;
  ctx.judge = &judge;
  ScoreGroup g;
  g.prompt_id = "max";
  g.question = "May a director resign?";
  g.gold_citations = {LawCode{3}, LawCode{7}};
  g.context_codes = {LawCode{3}, LawCode{5}, LawCode{7}};
  g.reference_answer = "A director may resign by giving written notice to the company.";
  ParsedResponse best;
  best.reasoning = "The resignation rule applies.";
  best.answer = g.reference_answer;
  best.citations = g.gold_citations;
  const std::string completion = render_response(best);

  const std::pair<RewardMode, double> want[] = {{RewardMode::CitationOnly, 2.5},
                                                {RewardMode::Semantic, 3.5},
                                                {RewardMode::CovCon, 4.0},
                                                {RewardMode::Combined, 5.5}};
  bool ok = true;
  std::string detail;
  testing::Rng rng(1006);
  for (const auto& [mode, target] : want) {
    const double got = score_completion(completion, g, mode, BlockOrder::ReasoningAnswerCitation, ctx).total;
    // nothing random may beat the constructed maximum
    double best_random = 0.0;
    for (int t = 0; t < 200; ++t) {
      auto r = testing::random_response(rng, BlockOrder::ReasoningAnswerCitation);
      if (rng.chance(0.3)) r.answer = g.reference_answer;
      const auto s = score_completion(render_response(r), g, mode, BlockOrder::ReasoningAnswerCitation, ctx);
      best_random = std::max(best_random, s.total);
    }
    ok = ok && got == target && max_total_reward(mode) == target && best_random <= target;
    detail += std::string(to_string(mode)) + " " + num(got, 17) + (got == target ? "" : " (want " + num(target, 1) + ")") + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  report("table: joint scores", 1.0, table_joint);
  report("table: relative gains", 1.0, table_gains);
  report("citation F1 oracle", 1.0, f1_oracle);
  report("gating suite", 0.0, gating);
  report("advantage properties", 0.0, advantages);
  report("toy GRPO convergence", 10.0, toy_grpo);
  report("prompt-builder invariants", 5.0, prompt_builder);
  report("fusion correctness", 0.0, fusion);
  report("parser round-trip", 0.0, round_trip);
  report("reward-mode bounds", 0.0, mode_bounds);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

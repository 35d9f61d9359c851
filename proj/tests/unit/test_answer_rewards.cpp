#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "nitireward/answer_rewards.hpp"
#include "nitireward/error.hpp"
#include "nitireward/judge.hpp"

using namespace nitireward;

namespace {

// Counts calls so gating can be observed.
class CountingEmbedder final : public EmbedderClient {
 public:
  std::vector<EmbeddingBundle> embed(std::span<const std::string> texts) override {
    ++calls;
    return inner.embed(texts);
  }
  HashNgramEmbedder inner;
  int calls = 0;
};

CitationRewardBreakdown subtotal(double v) {
  CitationRewardBreakdown c;
  c.subtotal = v;
  return c;
}

}  // namespace

TEST_CASE("coverage and consistency rewards") {
  CHECK(coverage_reward(CoverageLabel::None) == 0.0);
  CHECK(coverage_reward(CoverageLabel::Partial) == 0.5);
  CHECK(coverage_reward(CoverageLabel::Full) == 1.0);
  CHECK(consistency_reward(ContradictionLabel::NoContradiction) == 1.0);
  CHECK(consistency_reward(ContradictionLabel::Contradicts) == 0.0);
  for (auto l : {ContradictionLabel::NoContradiction, ContradictionLabel::Contradicts}) {
    CHECK(consistency_reward(l) == 1.0 - contradiction_score(l));
  }
}

TEST_CASE("semantic reward") {
  CountingEmbedder e;
  const HeadWeights w;
  CHECK(semantic_reward("same answer", "same answer", e, w, true) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.calls == 1);
  CHECK(semantic_reward("anything", "same answer", e, w, false) == 0.0);
  CHECK(e.calls == 1);  // gate failed, no call
  const double s = semantic_reward("A director may resign by giving written notice to the company.",
                                   "A director may resign by written notice to the company.", e, w, true);
  CHECK(s == doctest::Approx(0.85996901897762823).epsilon(1e-12));
}

TEST_CASE("totals per mode") {
  AnswerComponents c;
  c.semantic = 0.7;
  auto t = total_reward(RewardMode::Semantic, subtotal(1.0 + 0.5 + 2.0 / 3.0), c);
  CHECK(t.total == doctest::Approx(2.8667).epsilon(1e-4));
  CHECK(t.semantic == 0.7);
  CHECK_FALSE(t.coverage);

  t = total_reward(RewardMode::CitationOnly, subtotal(1.0), {});
  CHECK(t.total == 1.0);
  CHECK_FALSE(t.semantic);

  AnswerComponents all{1.0, 1.0, 1.0};
  CHECK(total_reward(RewardMode::Combined, subtotal(2.5), all).total == 5.5);
  // coverage 1 + consistency 1 on top of the subtotal; a stated 4.0 bound disagrees
  CHECK(total_reward(RewardMode::CovCon, subtotal(2.5), all).total == 4.5);
  CHECK(total_reward(RewardMode::Semantic, subtotal(2.5), all).total == 3.5);
  CHECK(total_reward(RewardMode::CitationOnly, subtotal(2.5), all).total == 2.5);
}

TEST_CASE("missing components are a configuration error") {
  try {
    total_reward(RewardMode::Semantic, subtotal(1.0), {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
  AnswerComponents only_semantic;
  only_semantic.semantic = 0.5;
  CHECK_THROWS_AS(total_reward(RewardMode::CovCon, subtotal(1.0), only_semantic), Error);
  CHECK_THROWS_AS(total_reward(RewardMode::Combined, subtotal(1.0), only_semantic), Error);
}

TEST_CASE("mode maxima") {
  CHECK(max_total_reward(RewardMode::CitationOnly) == 2.5);
  CHECK(max_total_reward(RewardMode::Semantic) == 3.5);
  CHECK(max_total_reward(RewardMode::CovCon) == 4.5);
  CHECK(max_total_reward(RewardMode::Combined) == 5.5);
  for (auto m : {RewardMode::Semantic, RewardMode::CovCon, RewardMode::Combined,
                 RewardMode::CitationOnly}) {
    CHECK(parse_reward_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_reward_mode("cov_con"));
}

TEST_CASE("mock judge") {
  MockJudge j;
  CHECK(judge_labels("q", "same", "same", j) ==
        JudgeLabels{CoverageLabel::Full, ContradictionLabel::NoContradiction});
  CHECK(judge_labels("q", "", "ref", j) ==
        JudgeLabels{CoverageLabel::None, ContradictionLabel::Contradicts});
  CHECK(judge_labels("q", "other", "ref", j) ==
        JudgeLabels{CoverageLabel::Partial, ContradictionLabel::NoContradiction});
}

TEST_CASE("label strings") {
  CHECK(parse_coverage_label("FULL") == CoverageLabel::Full);
  CHECK(parse_coverage_label(" partial ") == CoverageLabel::Partial);
  CHECK(parse_coverage_label("50") == CoverageLabel::Partial);
  CHECK(parse_coverage_label("100") == CoverageLabel::Full);
  CHECK(parse_coverage_label("0") == CoverageLabel::None);
  CHECK_FALSE(parse_coverage_label("mostly"));
  CHECK(parse_contradiction_label("NO_CONTRADICTION") == ContradictionLabel::NoContradiction);
  CHECK(parse_contradiction_label("contradiction") == ContradictionLabel::Contradicts);
  CHECK(parse_contradiction_label("1") == ContradictionLabel::Contradicts);
  CHECK(parse_contradiction_label("0") == ContradictionLabel::NoContradiction);
  CHECK_FALSE(parse_contradiction_label("maybe"));
  for (auto l : {CoverageLabel::None, CoverageLabel::Partial, CoverageLabel::Full}) {
    CHECK(parse_coverage_label(to_string(l)) == l);
  }
}

TEST_CASE("judge replies use the last labelled line") {
  CHECK(read_coverage_reply("thinking...\nLABEL: PARTIAL") == CoverageLabel::Partial);
  CHECK(read_coverage_reply("FULL\nsome notes\nCoverage: none\n") == CoverageLabel::None);
  CHECK(read_contradiction_reply("Verdict: NO_CONTRADICTION") == ContradictionLabel::NoContradiction);
  CHECK(read_contradiction_reply("CONTRADICTION") == ContradictionLabel::Contradicts);
  try {
    read_coverage_reply("I cannot decide.");
    FAIL("expected JudgeReplyError");
  } catch (const JudgeReplyError& e) {
    CHECK(e.raw_reply() == "I cannot decide.");
    CHECK(e.kind() == ErrorKind::UpstreamReply);
  }
}

TEST_CASE("templates fill their slots") {
  const JudgeRequest r{"Q?", "gen", "ref"};
  CHECK(render_template("{question}|{generated}|{reference}|{other}", r) == "Q?|gen|ref|{other}");
  const auto d = JudgeTemplates::defaults();
  CHECK(render_template(d.coverage, r).find("gen") != std::string::npos);
  CHECK(render_template(d.contradiction, r).find("ref") != std::string::npos);
}

TEST_CASE("templates load from files") {
  const std::string a = "judge_cov_tmpl.txt", b = "judge_con_tmpl.txt";
  std::ofstream(a) << "cover {generated}";
  std::ofstream(b) << "contra {reference}";
  const auto t = JudgeTemplates::load(a, b);
  CHECK(t.coverage == "cover {generated}");
  CHECK(t.contradiction == "contra {reference}");
  std::remove(a.c_str());
  std::remove(b.c_str());
  CHECK_THROWS_AS(JudgeTemplates::load("/nonexistent/a", "/nonexistent/b"), Error);
}

#include <doctest.h>

#include <atomic>

#include "nitireward/error.hpp"
#include "nitireward/rollout_scoring.hpp"

using namespace nitireward;

namespace {

class CountingEmbedder final : public EmbedderClient {
 public:
  std::vector<EmbeddingBundle> embed(std::span<const std::string> texts) override {
    ++calls;
    return inner.embed(texts);
  }
  HashNgramEmbedder inner;
  std::atomic<int> calls{0};
};

class CountingJudge final : public JudgeClient {
 public:
  JudgeLabels judge(const JudgeRequest& r) override {
    ++calls;
    return inner.judge(r);
  }
  MockJudge inner;
  std::atomic<int> calls{0};
};

class FailingJudge final : public JudgeClient {
 public:
  JudgeLabels judge(const JudgeRequest&) override { throw upstream_error("judge down"); }
};

std::string completion(const std::string& answer, std::initializer_list<std::uint64_t> codes) {
  ParsedResponse r;
  r.reasoning = "because";
  r.answer = answer;
  for (auto c : codes) r.citations.push_back(LawCode{c});
  return render_response(r);
}

ScoreGroup base_group() {
  ScoreGroup g;
  g.prompt_id = "p1";
  g.question = "May a director resign?";
  g.gold_citations = {LawCode{1}, LawCode{2}};
  g.context_codes = {LawCode{1}, LawCode{2}, LawCode{3}};
  g.reference_answer = "A director may resign by written notice to the company.";
  return g;
}

}  // namespace

TEST_CASE("identical completions give zero advantages") {
  CountingEmbedder e;
  ScoringContext ctx;
  ctx.embedder = &e;
  ScoreRequest req;
  auto g = base_group();
  g.completions.assign(10, completion(g.reference_answer, {1, 2}));
  req.groups.push_back(g);
  const auto res = score_request(req, ctx);
  REQUIRE(res.groups.size() == 1);
  CHECK(res.groups[0].advantages == std::vector<double>(10, 0.0));
  CHECK(res.groups[0].rewards[0].total == doctest::Approx(3.5).epsilon(1e-12));
  CHECK_FALSE(res.groups[0].loss.has_value());
}

TEST_CASE("unchanged policy gives a zero loss and shapes follow the groups") {
  CountingEmbedder e;
  ScoringContext ctx;
  ctx.embedder = &e;
  ScoreRequest req;
  auto g = base_group();
  g.completions = {completion(g.reference_answer, {1, 2}), completion("no idea", {3}), "garbage"};
  g.logp_new = std::vector<double>{-1.0, -2.0, -3.0};
  g.logp_old = g.logp_new;
  req.groups.push_back(g);
  auto g2 = base_group();
  g2.prompt_id = "p2";
  g2.completions = {completion("x", {1}), completion("y", {9})};
  req.groups.push_back(g2);

  const auto res = score_request(req, ctx);
  REQUIRE(res.groups.size() == 2);
  CHECK(res.groups[0].prompt_id == "p1");
  CHECK(res.groups[0].rewards.size() == 3);
  CHECK(res.groups[0].advantages.size() == 3);
  REQUIRE(res.groups[0].loss.has_value());
  CHECK(res.groups[0].loss->loss == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(res.groups[1].rewards.size() == 2);
  CHECK_FALSE(res.groups[1].loss.has_value());
  CHECK(res.groups[0].advantages[0] > 0.0);
  CHECK(res.groups[0].advantages[2] < 0.0);
}

TEST_CASE("request mode and order override the context") {
  CountingEmbedder e;
  CountingJudge j;
  ScoringContext ctx;
  ctx.embedder = &e;
  ctx.judge = &j;
  ScoreRequest req;
  req.mode = RewardMode::CovCon;
  auto g = base_group();
  g.completions = {completion(g.reference_answer, {1, 2}), completion("other", {1})};
  req.groups.push_back(g);
  const auto res = score_request(req, ctx);
  CHECK(res.mode == RewardMode::CovCon);
  CHECK(e.calls == 0);
  CHECK(j.calls == 2);
  CHECK(res.groups[0].rewards[0].total == 4.5);
  CHECK_FALSE(res.groups[0].rewards[0].semantic.has_value());
  CHECK(res.groups[0].rewards[1].coverage == 0.5);
}

TEST_CASE("failed format gate makes no upstream call") {
  CountingEmbedder e;
  CountingJudge j;
  ScoringContext ctx;
  ctx.embedder = &e;
  ctx.judge = &j;
  auto g = base_group();
  const auto r = score_completion("just text", g, RewardMode::Combined, BlockOrder::ReasoningAnswerCitation, ctx);
  CHECK(e.calls == 0);
  CHECK(j.calls == 0);
  CHECK(r.semantic == 0.0);
  CHECK(r.coverage == 0.0);
  CHECK(r.consistency == 0.0);
  CHECK(r.total == r.citation.subtotal);
}

TEST_CASE("citation-only mode needs no backend") {
  ScoringContext ctx;
  ctx.mode = RewardMode::CitationOnly;
  ScoreRequest req;
  auto g = base_group();
  g.completions = {completion("a", {1, 2}), completion("b", {})};
  req.groups.push_back(g);
  const auto res = score_request(req, ctx);
  CHECK(res.groups[0].rewards[0].total == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("configuration and input errors") {
  ScoringContext ctx;
  ScoreRequest req;
  auto g = base_group();
  g.completions = {completion("a", {1}), completion("b", {2})};
  req.groups.push_back(g);
  try {
    score_request(req, ctx);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }

  CountingEmbedder emb;
  ctx.embedder = &emb;
  req.groups[0].completions.resize(1);
  try {
    score_request(req, ctx);
    FAIL("expected an argument error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }

  req.groups[0] = g;
  req.groups[0].logp_new = std::vector<double>{0.0, 0.0};
  CHECK_THROWS_AS(score_request(req, ctx), Error);
  req.groups[0].logp_old = std::vector<double>{0.0};
  CHECK_THROWS_AS(score_request(req, ctx), Error);
}

TEST_CASE("upstream failure aborts the batch") {
  FailingJudge j;
  ScoringContext ctx;
  ctx.mode = RewardMode::CovCon;
  ctx.judge = &j;
  ctx.max_parallel = 4;
  ScoreRequest req;
  auto g = base_group();
  g.completions = {completion("a", {1}), completion("b", {2}), completion("c", {1, 2})};
  req.groups.push_back(g);
  try {
    score_request(req, ctx);
    FAIL("expected an upstream error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Upstream);
    CHECK(e.retryable());
  }
}

TEST_CASE("parallel judging matches serial judging") {
  CountingJudge j;
  ScoringContext ctx;
  ctx.mode = RewardMode::CovCon;
  ctx.judge = &j;
  ScoreRequest req;
  auto g = base_group();
  for (int i = 0; i < 12; ++i) g.completions.push_back(completion(i % 3 ? "x" : g.reference_answer, {1}));
  req.groups.push_back(g);
  const auto serial = score_request(req, ctx);
  ctx.max_parallel = 6;
  const auto parallel = score_request(req, ctx);
  CHECK(serial.groups[0].advantages == parallel.groups[0].advantages);
}

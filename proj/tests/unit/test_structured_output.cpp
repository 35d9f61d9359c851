#include <doctest.h>

#include "nitireward/error.hpp"
#include "nitireward/structured_output.hpp"
#include "support/generators.hpp"

using namespace nitireward;

namespace {

const char* const kTargetOutput =
    "<reasoning>\n"
    "The laws related to the method for director resignation are ...\n"
    "</reasoning>\n"
    "<answer>\n"
    "According to Section 1153/1 of the Civil and Commercial Code and ...\n"
    "</answer>\n"
    "<citation>\n"
    "<law_code>2</law_code>\n"
    "<law_code>5</law_code>\n"
    "</citation>\n";

const char* const kInputPrompt =
    "What is the difference between financial institution business and financial business?\n"
    "\n"
    "Relevant sections\n"
    "<law_code>1</law_code><context>...</context>\n"
    "<law_code>2</law_code><context>...</context>\n"
    "<law_code>3</law_code><context>...</context>\n"
    "<law_code>4</law_code><context>...</context>\n"
    "<law_code>5</law_code><context>...</context>\n";

std::vector<LawCode> codes(std::initializer_list<std::uint64_t> v) {
  std::vector<LawCode> out;
  for (auto x : v) out.push_back(LawCode{x});
  return out;
}

}  // namespace

TEST_CASE("target output parses with both citations and a full format score") {
  const auto r = parse_response(kTargetOutput, BlockOrder::ReasoningAnswerCitation);
  REQUIRE(r.response);
  CHECK(r.response->citations == codes({2, 5}));
  CHECK(r.response->reasoning == "The laws related to the method for director resignation are ...");
  CHECK(r.response->answer ==
        "According to Section 1153/1 of the Civil and Commercial Code and ...");
  CHECK(r.diagnostics.graded_score == 1.0);
  CHECK(r.diagnostics.passed());
}

TEST_CASE("empty string is absent with score 0") {
  const auto r = parse_response("", BlockOrder::ReasoningAnswerCitation);
  CHECK_FALSE(r.response);
  CHECK(r.diagnostics.graded_score == 0.0);
  CHECK(r.diagnostics.satisfied_checks() == 0);
}

TEST_CASE("missing citation block scores two of five checks") {
  const auto r = parse_response("<reasoning>r</reasoning><answer>a</answer>",
                                BlockOrder::ReasoningAnswerCitation);
  CHECK_FALSE(r.response);
  CHECK(r.diagnostics.has_reasoning);
  CHECK(r.diagnostics.has_answer);
  CHECK_FALSE(r.diagnostics.has_citation);
  CHECK_FALSE(r.diagnostics.order_ok);
  CHECK_FALSE(r.diagnostics.codes_parseable);
  CHECK(r.diagnostics.graded_score == 0.4);
}

TEST_CASE("block order is checked against the expected order") {
  ParsedResponse p{"r", "a", codes({1}), BlockOrder::ReasoningCitationAnswer};
  const auto text = render_response(p);
  const auto wrong = parse_response(text, BlockOrder::ReasoningAnswerCitation);
  CHECK_FALSE(wrong.response);
  CHECK_FALSE(wrong.diagnostics.order_ok);
  CHECK(wrong.diagnostics.satisfied_checks() == 4);
  const auto right = parse_response(text, BlockOrder::ReasoningCitationAnswer);
  REQUIRE(right.response);
  CHECK(*right.response == p);
}

TEST_CASE("duplicate blocks fail the presence check") {
  std::string text = kTargetOutput;
  text += "<answer>again</answer>";
  const auto r = parse_response(text, BlockOrder::ReasoningAnswerCitation);
  CHECK_FALSE(r.response);
  CHECK_FALSE(r.diagnostics.has_answer);
}

TEST_CASE("unreadable law code fails only the code check") {
  const auto r = parse_response(
      "<reasoning>r</reasoning><answer>a</answer><citation><law_code>2a</law_code></citation>",
      BlockOrder::ReasoningAnswerCitation);
  CHECK_FALSE(r.response);
  CHECK_FALSE(r.diagnostics.codes_parseable);
  CHECK(r.diagnostics.satisfied_checks() == 4);
  CHECK(r.diagnostics.graded_score == 0.8);
}

TEST_CASE("duplicate citations are kept and counted") {
  const auto r = parse_response(
      "<reasoning>r</reasoning><answer>a</answer><citation><law_code>3</law_code>"
      "<law_code>3</law_code><law_code> 7 </law_code></citation>",
      BlockOrder::ReasoningAnswerCitation);
  REQUIRE(r.response);
  CHECK(r.response->citations == codes({3, 3, 7}));
  CHECK(r.diagnostics.duplicate_citations == 1);
}

TEST_CASE("text outside the blocks is ignored") {
  const std::string text = std::string("preamble ") + kTargetOutput + " trailing";
  const auto r = parse_response(text, BlockOrder::ReasoningAnswerCitation);
  REQUIRE(r.response);
  CHECK(r.response->citations == codes({2, 5}));
}

TEST_CASE("render puts the citation block last in the default order") {
  ParsedResponse p{"why", "what", codes({2, 5}), BlockOrder::ReasoningAnswerCitation};
  const auto text = render_response(p);
  CHECK(text.find("<citation>") > text.find("</answer>"));
  CHECK(text.rfind("</citation>\n") == text.size() - std::string("</citation>\n").size());
}

TEST_CASE("render of empty citations keeps an empty citation block") {
  ParsedResponse p{"why", "what", {}, BlockOrder::ReasoningAnswerCitation};
  const auto text = render_response(p);
  CHECK(text.find("<citation>\n</citation>") != std::string::npos);
  const auto r = parse_response(text, p.order);
  REQUIRE(r.response);
  CHECK(r.response->citations.empty());
}

TEST_CASE("parse of render is the identity on random responses") {
  testing::Rng rng(11);
  for (auto order : {BlockOrder::ReasoningAnswerCitation, BlockOrder::ReasoningCitationAnswer}) {
    for (int i = 0; i < 300; ++i) {
      const auto p = testing::random_response(rng, order);
      const auto r = parse_response(render_response(p), order);
      REQUIRE(r.response);
      CHECK(*r.response == p);
      CHECK(r.diagnostics.graded_score == 1.0);
    }
  }
}

TEST_CASE("graded score is the satisfied share and presence means all checks passed") {
  testing::Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto order = rng.chance(0.5) ? BlockOrder::ReasoningAnswerCitation
                                       : BlockOrder::ReasoningCitationAnswer;
    const auto text = testing::garble(rng, render_response(testing::random_response(rng, order)));
    const auto r = parse_response(text, order);
    const auto& d = r.diagnostics;
    CHECK(d.graded_score == double(d.satisfied_checks()) / 5.0);
    CHECK(r.response.has_value() == d.passed());
    if (d.order_ok) CHECK((d.has_reasoning && d.has_answer && d.has_citation));
    if (d.codes_parseable) CHECK(d.has_citation);
  }
}

TEST_CASE("block order names round-trip") {
  for (auto o : {BlockOrder::ReasoningAnswerCitation, BlockOrder::ReasoningCitationAnswer}) {
    CHECK(parse_block_order(to_string(o)) == o);
  }
  CHECK_FALSE(parse_block_order("citation_first"));
}

TEST_CASE("context codes of the sample prompt") {
  CHECK(extract_context_codes(kInputPrompt) == make_code_set({1, 2, 3, 4, 5}));
}

TEST_CASE("prompt without sections yields no codes") {
  CHECK(extract_context_codes("Question?\n\nRelevant sections\n").empty());
}

TEST_CASE("repeated context codes collapse") {
  const auto prompt =
      "<law_code>7</law_code><context>a</context>\n<law_code>7</law_code><context>b</context>\n"
      "<law_code>9</law_code><context>c</context>\n";
  CHECK(extract_context_codes(prompt) == make_code_set({7, 9}));
}

TEST_CASE("malformed context entries raise a located parse error") {
  const std::string bad_code = "x\n<law_code>1b</law_code><context>t</context>";
  try {
    extract_context_codes(bad_code);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 12);  // the unreadable code itself
    CHECK(e.length() == 2);
    CHECK(e.kind() == ErrorKind::Input);
  }
  CHECK_THROWS_AS(extract_context_codes("<law_code>1</law_code><context>open"), ParseError);
  CHECK_THROWS_AS(extract_context_codes("<law_code>1"), ParseError);
}

TEST_CASE("law code parsing") {
  CHECK(parse_law_code("42") == LawCode{42});
  CHECK(parse_law_code(" 7\n") == LawCode{7});
  CHECK(parse_law_code("18446744073709551615") == LawCode{UINT64_MAX});
  CHECK_FALSE(parse_law_code("18446744073709551616"));
  CHECK_FALSE(parse_law_code(""));
  CHECK_FALSE(parse_law_code("-1"));
  CHECK_FALSE(parse_law_code("+1"));
  CHECK_FALSE(parse_law_code("1 2"));
}

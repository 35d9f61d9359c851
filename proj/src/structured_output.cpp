#include "nitireward/structured_output.hpp"

#include <array>

#include "nitireward/error.hpp"

namespace nitireward {
namespace {

constexpr std::string_view kLawCodeOpen = "<law_code>";
constexpr std::string_view kLawCodeClose = "</law_code>";
constexpr std::string_view kContextOpen = "<context>";
constexpr std::string_view kContextClose = "</context>";

struct TagPair {
  std::string_view open;
  std::string_view close;
};

constexpr TagPair kReasoning{"<reasoning>", "</reasoning>"};
constexpr TagPair kAnswer{"<answer>", "</answer>"};
constexpr TagPair kCitation{"<citation>", "</citation>"};

struct Block {
  bool present = false;
  std::size_t begin = 0;  // offset of the opening tag
  std::size_t end = 0;    // one past the closing tag
  std::string_view inner;
};

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// A block counts as present only when its opening and closing tags each occur
// exactly once, with the closing tag after the opening tag.
Block find_block(std::string_view text, TagPair tags) {
  Block b;
  if (count_occurrences(text, tags.open) != 1 || count_occurrences(text, tags.close) != 1) return b;
  const auto open = text.find(tags.open);
  const auto close = text.find(tags.close);
  if (close < open + tags.open.size()) return b;
  b.present = true;
  b.begin = open;
  b.end = close + tags.close.size();
  b.inner = text.substr(open + tags.open.size(), close - open - tags.open.size());
  return b;
}

std::string strip_block_newlines(std::string_view inner) {
  if (!inner.empty() && inner.front() == '\n') inner.remove_prefix(1);
  if (!inner.empty() && inner.back() == '\n') inner.remove_suffix(1);
  return std::string(inner);
}

// Returns false if any <law_code> entry is unterminated or non-numeric.
bool parse_citation_codes(std::string_view inner, std::vector<LawCode>& out) {
  std::size_t pos = 0;
  while ((pos = inner.find(kLawCodeOpen, pos)) != std::string_view::npos) {
    const auto value_begin = pos + kLawCodeOpen.size();
    const auto close = inner.find(kLawCodeClose, value_begin);
    if (close == std::string_view::npos) return false;
    auto code = parse_law_code(inner.substr(value_begin, close - value_begin));
    if (!code) return false;
    out.push_back(*code);
    pos = close + kLawCodeClose.size();
  }
  return true;
}

}  // namespace

std::string_view to_string(BlockOrder order) noexcept {
  switch (order) {
    case BlockOrder::ReasoningAnswerCitation:
      return "reasoning_answer_citation";
    case BlockOrder::ReasoningCitationAnswer:
      return "reasoning_citation_answer";
  }
  return "reasoning_answer_citation";
}

std::optional<BlockOrder> parse_block_order(std::string_view name) noexcept {
  if (name == "reasoning_answer_citation") return BlockOrder::ReasoningAnswerCitation;
  if (name == "reasoning_citation_answer") return BlockOrder::ReasoningCitationAnswer;
  return std::nullopt;
}

int FormatDiagnostics::satisfied_checks() const noexcept {
  return int(has_reasoning) + int(has_answer) + int(has_citation) + int(order_ok) +
         int(codes_parseable);
}

ParseResult parse_response(std::string_view text, BlockOrder order) {
  ParseResult result;
  auto& diag = result.diagnostics;

  const Block reasoning = find_block(text, kReasoning);
  const Block answer = find_block(text, kAnswer);
  const Block citation = find_block(text, kCitation);
  diag.has_reasoning = reasoning.present;
  diag.has_answer = answer.present;
  diag.has_citation = citation.present;

  if (reasoning.present && answer.present && citation.present) {
    const std::array<const Block*, 3> expected =
        order == BlockOrder::ReasoningAnswerCitation
            ? std::array<const Block*, 3>{&reasoning, &answer, &citation}
            : std::array<const Block*, 3>{&reasoning, &citation, &answer};
    diag.order_ok = expected[0]->end <= expected[1]->begin && expected[1]->end <= expected[2]->begin;
  }

  std::vector<LawCode> citations;
  if (citation.present) diag.codes_parseable = parse_citation_codes(citation.inner, citations);
  diag.duplicate_citations = citations.size() - to_code_set(citations).size();
  diag.graded_score = double(diag.satisfied_checks()) / FormatDiagnostics::kTotalChecks;

  if (diag.passed()) {
    result.response = ParsedResponse{strip_block_newlines(reasoning.inner),
                                     strip_block_newlines(answer.inner), std::move(citations),
                                     order};
  }
  return result;
}

std::string render_response(const ParsedResponse& r) {
  auto wrap = [](TagPair tags, std::string_view body) {
    std::string out;
    out.reserve(body.size() + tags.open.size() + tags.close.size() + 3);
    out.append(tags.open).append("\n").append(body).append("\n").append(tags.close).append("\n");
    return out;
  };

  std::string citation(kCitation.open);
  citation.append("\n");
  for (const auto& code : r.citations) {
    citation.append(kLawCodeOpen).append(to_string(code)).append(kLawCodeClose).append("\n");
  }
  citation.append(kCitation.close).append("\n");

  std::string out = wrap(kReasoning, r.reasoning);
  if (r.order == BlockOrder::ReasoningAnswerCitation) {
    out += wrap(kAnswer, r.answer);
    out += citation;
  } else {
    out += citation;
    out += wrap(kAnswer, r.answer);
  }
  return out;
}

bool is_well_formed(const ParsedResponse& r) noexcept {
  for (std::string_view field : {std::string_view(r.reasoning), std::string_view(r.answer)}) {
    for (const auto& tags : {kReasoning, kAnswer, kCitation}) {
      if (field.find(tags.open) != std::string_view::npos ||
          field.find(tags.close) != std::string_view::npos) {
        return false;
      }
    }
  }
  return true;
}

CodeSet extract_context_codes(std::string_view prompt) {
  CodeSet codes;
  std::size_t pos = 0;
  while ((pos = prompt.find(kLawCodeOpen, pos)) != std::string_view::npos) {
    const auto value_begin = pos + kLawCodeOpen.size();
    const auto close = prompt.find(kLawCodeClose, value_begin);
    if (close == std::string_view::npos) {
      throw ParseError("unterminated <law_code> tag", pos, prompt.size() - pos);
    }
    const auto after = close + kLawCodeClose.size();
    // law_code tags not followed by a context block are not context entries
    if (prompt.substr(after, kContextOpen.size()) != kContextOpen) {
      pos = after;
      continue;
    }
    const auto inner = prompt.substr(value_begin, close - value_begin);
    auto code = parse_law_code(inner);
    if (!code) {
      throw ParseError("law_code is not a non-negative integer: '" + std::string(inner) + "'",
                       value_begin, inner.size());
    }
    const auto context_close = prompt.find(kContextClose, after + kContextOpen.size());
    if (context_close == std::string_view::npos) {
      throw ParseError("unterminated <context> block for law_code " + to_string(*code), after,
                       prompt.size() - after);
    }
    codes.insert(*code);
    pos = context_close + kContextClose.size();
  }
  return codes;
}

}  // namespace nitireward

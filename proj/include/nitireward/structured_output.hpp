#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nitireward/law_code.hpp"

namespace nitireward {

enum class BlockOrder {
  ReasoningAnswerCitation,
  ReasoningCitationAnswer,  // citation-first variant
};

std::string_view to_string(BlockOrder order) noexcept;
std::optional<BlockOrder> parse_block_order(std::string_view name) noexcept;

struct ParsedResponse {
  std::string reasoning;
  std::string answer;
  std::vector<LawCode> citations;  // in emitted order, duplicates kept
  BlockOrder order = BlockOrder::ReasoningAnswerCitation;

  bool operator==(const ParsedResponse&) const = default;
};

/// Outcome of the five structural checks run by parse_response:
/// each of the three blocks present exactly once, blocks in the expected
/// order, and every <law_code> entry inside the citation block readable.
struct FormatDiagnostics {
  bool has_reasoning = false;
  bool has_answer = false;
  bool has_citation = false;
  bool order_ok = false;
  bool codes_parseable = false;
  std::size_t duplicate_citations = 0;
  double graded_score = 0.0;

  static constexpr int kTotalChecks = 5;

  int satisfied_checks() const noexcept;
  bool passed() const noexcept { return satisfied_checks() == kTotalChecks; }
};

struct ParseResult {
  std::optional<ParsedResponse> response;
  FormatDiagnostics diagnostics;
};

/// Total: never throws, malformed text yields an absent response.
/// Text outside the three blocks is ignored. A single newline directly
/// after an opening tag and directly before a closing tag is stripped.
ParseResult parse_response(std::string_view text, BlockOrder order);

/// Renders blocks in `r.order`, one law_code per line in the citation block.
std::string render_response(const ParsedResponse& r);

/// True when the free-text fields carry none of the reserved block tags, so
/// that render_response/parse_response round-trip.
bool is_well_formed(const ParsedResponse& r) noexcept;

/// Law codes of every `<law_code>N</law_code><context>...</context>` entry in
/// a prompt. Throws ParseError naming the span of a malformed entry.
CodeSet extract_context_codes(std::string_view prompt);

}  // namespace nitireward

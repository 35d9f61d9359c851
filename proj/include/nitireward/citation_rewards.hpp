#pragma once

#include "nitireward/law_code.hpp"
#include "nitireward/structured_output.hpp"

namespace nitireward {

inline constexpr double kNonHallucinationReward = 0.5;

struct CitationScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Gated cascade: format -> non-hallucination -> citation F1.
/// A failed gate zeroes every component downstream of it.
struct CitationRewardBreakdown {
  double format = 0.0;
  bool format_pass = false;
  double non_hallucination = 0.0;
  bool halluc_pass = false;
  double citation_f1 = 0.0;
  double subtotal = 0.0;
};

struct GateResult {
  double score = 0.0;
  bool pass = false;
};

// score is the graded 5-check fraction; pass requires a full parse.
GateResult format_reward(const FormatDiagnostics& diag) noexcept;

// All-or-nothing: 0.5 iff cited is a subset of context. The empty set passes.
GateResult non_hallucination_reward(const CodeSet& cited, const CodeSet& context,
                                    bool format_pass) noexcept;

CitationScores citation_f1(const CodeSet& cited, const CodeSet& gold) noexcept;

// Duplicated citations in `parsed.response` are collapsed before scoring.
CitationRewardBreakdown citation_cascade(const ParseResult& parsed, const CodeSet& context,
                                         const CodeSet& gold);

}  // namespace nitireward

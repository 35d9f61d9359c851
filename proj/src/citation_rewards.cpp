#include "nitireward/citation_rewards.hpp"

#include <algorithm>
#include <iterator>

namespace nitireward {

GateResult format_reward(const FormatDiagnostics& diag) noexcept {
  return {diag.graded_score, diag.passed()};
}

GateResult non_hallucination_reward(const CodeSet& cited, const CodeSet& context,
                                    bool format_pass) noexcept {
  if (!format_pass) return {0.0, false};
  const bool subset = std::includes(context.begin(), context.end(), cited.begin(), cited.end());
  return subset ? GateResult{kNonHallucinationReward, true} : GateResult{0.0, false};
}

CitationScores citation_f1(const CodeSet& cited, const CodeSet& gold) noexcept {
  std::size_t hits = 0;
  for (const auto& code : cited) hits += gold.count(code);

  CitationScores s;
  s.precision = cited.empty() ? 0.0 : double(hits) / double(cited.size());
  s.recall = gold.empty() ? 0.0 : double(hits) / double(gold.size());
  // 2PR/(P+R) rewritten over counts: one rounding instead of four
  s.f1 = hits == 0 ? 0.0 : 2.0 * double(hits) / double(cited.size() + gold.size());
  return s;
}

CitationRewardBreakdown citation_cascade(const ParseResult& parsed, const CodeSet& context,
                                         const CodeSet& gold) {
  CitationRewardBreakdown b;
  const auto fmt = format_reward(parsed.diagnostics);
  b.format = fmt.score;
  b.format_pass = fmt.pass && parsed.response.has_value();

  CodeSet cited;
  if (b.format_pass) cited = to_code_set(parsed.response->citations);

  const auto halluc = non_hallucination_reward(cited, context, b.format_pass);
  b.non_hallucination = halluc.score;
  b.halluc_pass = halluc.pass;

  if (b.format_pass && b.halluc_pass) b.citation_f1 = citation_f1(cited, gold).f1;
  b.subtotal = b.format + b.non_hallucination + b.citation_f1;
  return b;
}

}  // namespace nitireward

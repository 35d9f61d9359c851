#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nitireward/error.hpp"
#include "nitireward/law_code.hpp"

namespace nitireward {

inline constexpr std::size_t kDefaultTokenBudget = 8192;
inline constexpr std::size_t kDefaultTopK = 10;

/// count("") == 0 and count(a + b) >= max(count(a), count(b)).
/// Implementations must be safe to call concurrently.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::size_t count(std::string_view text) const = 0;
  virtual std::vector<std::size_t> count_many(std::span<const std::string> texts) const;
};

// Offline stand-in for the model tokenizer: ceil(bytes / 3).
class HeuristicTokenCounter final : public TokenCounter {
 public:
  std::size_t count(std::string_view text) const override { return (text.size() + 2) / 3; }
};

struct PromptSection {
  LawCode code;
  std::string text;
};

struct PromptBundle {
  std::string text;
  std::vector<LawCode> included_codes;  // rank order
  std::size_t token_count = 0;
  std::size_t replacements_made = 0;
};

class BudgetError : public Error {
 public:
  enum class Reason { Question, Gold };

  BudgetError(Reason reason, std::size_t overflow);

  Reason reason() const noexcept { return reason_; }
  std::size_t overflow() const noexcept { return overflow_; }

 private:
  Reason reason_;
  std::size_t overflow_;
};

// "<law_code>CODE</law_code><context>TEXT</context>\n"
std::string render_context_line(const PromptSection& section);
std::string render_context_block(std::span<const PromptSection> sections);

// question, blank line, "Relevant sections" header, then the context block.
std::string render_prompt(std::string_view question, std::span<const PromptSection> sections);

/// Packs the top-k ranked sections under `budget` tokens.
///
/// Gold sections are always kept: one missing from the top-k displaces the
/// lowest-ranked non-gold entry, taking its text from `ranked` or, when the
/// retriever missed it, from `gold_texts`. While over budget the longest
/// non-gold section (ties: worst rank) is dropped and the best-ranked unused
/// section that fits the remaining slack is appended.
///
/// Throws BudgetError when the question alone, or the question with the gold
/// sections alone, exceeds the budget.
PromptBundle build_prompt(std::string_view question, std::span<const PromptSection> ranked,
                          const CodeSet& gold, std::span<const PromptSection> gold_texts,
                          const TokenCounter& counter, std::size_t budget = kDefaultTokenBudget,
                          std::size_t k = kDefaultTopK);

}  // namespace nitireward

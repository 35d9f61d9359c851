#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace nitireward {

enum class CoverageLabel { None, Partial, Full };
enum class ContradictionLabel { Contradicts, NoContradiction };

std::string_view to_string(CoverageLabel label) noexcept;
std::string_view to_string(ContradictionLabel label) noexcept;

// Accepts the label names ("none" | "partial" | "full",
// "contradicts" | "no_contradiction") and the 0/50/100 and 1/0 judge scales.
std::optional<CoverageLabel> parse_coverage_label(std::string_view text);
std::optional<ContradictionLabel> parse_contradiction_label(std::string_view text);

struct JudgeLabels {
  CoverageLabel coverage = CoverageLabel::None;
  ContradictionLabel contradiction = ContradictionLabel::Contradicts;

  bool operator==(const JudgeLabels&) const = default;
};

struct JudgeRequest {
  std::string question;
  std::string generated;
  std::string reference;
};

class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual JudgeLabels judge(const JudgeRequest& request) = 0;
};

/// Deterministic stand-in for the LLM judge:
///   generated == reference  -> Full / NoContradiction
///   generated empty         -> None / Contradicts
///   otherwise               -> Partial / NoContradiction
class MockJudge final : public JudgeClient {
 public:
  JudgeLabels judge(const JudgeRequest& request) override;
};

/// Prompt templates with {question}, {generated} and {reference} slots.
struct JudgeTemplates {
  std::string coverage;
  std::string contradiction;

  static JudgeTemplates defaults();
  static JudgeTemplates load(const std::string& coverage_path, const std::string& contradiction_path);
};

std::string render_template(std::string_view tmpl, const JudgeRequest& request);

// Reads the last line of a judge reply that holds a valid label, optionally
// prefixed by "label:". Throws JudgeReplyError carrying the raw reply.
CoverageLabel read_coverage_reply(std::string_view reply);
ContradictionLabel read_contradiction_reply(std::string_view reply);

JudgeLabels judge_labels(std::string_view question, std::string_view generated,
                         std::string_view reference, JudgeClient& judge);

}  // namespace nitireward

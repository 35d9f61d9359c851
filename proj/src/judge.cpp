#include "nitireward/judge.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "nitireward/error.hpp"

namespace nitireward {
namespace {

std::string normalize_token(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  auto junk = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '`' || c == '"' ||
           c == '\'' || c == '.' || c == '[' || c == ']';
  };
  while (!s.empty() && junk(s.front())) s.erase(s.begin());
  while (!s.empty() && junk(s.back())) s.pop_back();
  std::replace(s.begin(), s.end(), ' ', '_');
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::vector<std::string_view> lines_reversed(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  std::reverse(lines.begin(), lines.end());
  return lines;
}

std::string_view strip_label_prefix(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos) return line;
  const std::string key = normalize_token(line.substr(0, colon));
  if (key == "label" || key == "coverage" || key == "contradiction" || key == "verdict") {
    return line.substr(colon + 1);
  }
  return line;
}

template <typename Label, typename Parse>
Label read_reply(std::string_view reply, Parse parse, const char* what) {
  for (auto line : lines_reversed(reply)) {
    if (auto label = parse(strip_label_prefix(line))) return *label;
  }
  throw JudgeReplyError(std::string("judge reply holds no ") + what + " label", std::string(reply));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read judge template '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::string_view kDefaultCoverage =
    "You grade how well a generated answer to a legal question covers a reference answer.\n"
    "\n"
    "Question:\n{question}\n"
    "\n"
    "Reference answer:\n{reference}\n"
    "\n"
    "Generated answer:\n{generated}\n"
    "\n"
    "Decide whether the generated answer covers none, part, or all of the key points of the\n"
    "reference answer. Finish with exactly one line of the form\n"
    "LABEL: NONE | PARTIAL | FULL\n";

constexpr std::string_view kDefaultContradiction =
    "You check whether a generated answer to a legal question contradicts a reference answer.\n"
    "\n"
    "Question:\n{question}\n"
    "\n"
    "Reference answer:\n{reference}\n"
    "\n"
    "Generated answer:\n{generated}\n"
    "\n"
    "Finish with exactly one line of the form\n"
    "LABEL: CONTRADICTION | NO_CONTRADICTION\n";

}  // namespace

std::string_view to_string(CoverageLabel label) noexcept {
  switch (label) {
    case CoverageLabel::None:
      return "none";
    case CoverageLabel::Partial:
      return "partial";
    case CoverageLabel::Full:
      return "full";
  }
  return "none";
}

std::string_view to_string(ContradictionLabel label) noexcept {
  return label == ContradictionLabel::Contradicts ? "contradicts" : "no_contradiction";
}

std::optional<CoverageLabel> parse_coverage_label(std::string_view text) {
  const auto t = normalize_token(text);
  if (t == "none" || t == "0") return CoverageLabel::None;
  if (t == "partial" || t == "50") return CoverageLabel::Partial;
  if (t == "full" || t == "100") return CoverageLabel::Full;
  return std::nullopt;
}

std::optional<ContradictionLabel> parse_contradiction_label(std::string_view text) {
  const auto t = normalize_token(text);
  if (t == "contradicts" || t == "contradiction" || t == "1") return ContradictionLabel::Contradicts;
  if (t == "no_contradiction" || t == "0") return ContradictionLabel::NoContradiction;
  return std::nullopt;
}

JudgeLabels MockJudge::judge(const JudgeRequest& request) {
  if (request.generated == request.reference && !request.generated.empty()) {
    return {CoverageLabel::Full, ContradictionLabel::NoContradiction};
  }
  if (request.generated.empty()) return {CoverageLabel::None, ContradictionLabel::Contradicts};
  return {CoverageLabel::Partial, ContradictionLabel::NoContradiction};
}

JudgeTemplates JudgeTemplates::defaults() {
  return {std::string(kDefaultCoverage), std::string(kDefaultContradiction)};
}

JudgeTemplates JudgeTemplates::load(const std::string& coverage_path,
                                    const std::string& contradiction_path) {
  return {read_file(coverage_path), read_file(contradiction_path)};
}

std::string render_template(std::string_view tmpl, const JudgeRequest& request) {
  std::string out;
  out.reserve(tmpl.size() + request.question.size() + request.generated.size() +
              request.reference.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const auto slot = tmpl.substr(i + 1, close - i - 1);
        const std::string* value = nullptr;
        if (slot == "question") value = &request.question;
        if (slot == "generated") value = &request.generated;
        if (slot == "reference") value = &request.reference;
        if (value) {
          out += *value;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

CoverageLabel read_coverage_reply(std::string_view reply) {
  return read_reply<CoverageLabel>(reply, parse_coverage_label, "coverage");
}

ContradictionLabel read_contradiction_reply(std::string_view reply) {
  return read_reply<ContradictionLabel>(reply, parse_contradiction_label, "contradiction");
}

JudgeLabels judge_labels(std::string_view question, std::string_view generated,
                         std::string_view reference, JudgeClient& judge) {
  return judge.judge(
      JudgeRequest{std::string(question), std::string(generated), std::string(reference)});
}

}  // namespace nitireward

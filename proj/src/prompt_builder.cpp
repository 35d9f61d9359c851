#include "nitireward/prompt_builder.hpp"

#include <algorithm>
#include <map>

namespace nitireward {
namespace {

struct Entry {
  const PromptSection* section = nullptr;
  std::size_t rank = 0;  // position in the ranked list; unretrieved gold sort after it
  bool gold = false;
  std::size_t tokens = 0;
};

std::vector<PromptSection> sections_of(const std::vector<Entry>& entries) {
  std::vector<PromptSection> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(*e.section);
  return out;
}

void sort_by_rank(std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.rank < b.rank; });
}

}  // namespace

std::vector<std::size_t> TokenCounter::count_many(std::span<const std::string> texts) const {
  std::vector<std::size_t> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(count(t));
  return out;
}

BudgetError::BudgetError(Reason reason, std::size_t overflow)
    : Error(ErrorKind::InvalidArgument,
            std::string(reason == Reason::Question ? "question alone" : "gold sections alone") +
                " exceed the token budget by " + std::to_string(overflow) + " tokens"),
      reason_(reason),
      overflow_(overflow) {}

std::string render_context_line(const PromptSection& section) {
  std::string out = "<law_code>";
  out += to_string(section.code);
  out += "</law_code><context>";
  out += section.text;
  out += "</context>\n";
  return out;
}

std::string render_context_block(std::span<const PromptSection> sections) {
  std::string out;
  for (const auto& s : sections) out += render_context_line(s);
  return out;
}

std::string render_prompt(std::string_view question, std::span<const PromptSection> sections) {
  std::string out(question);
  out += "\n\nRelevant sections\n";
  out += render_context_block(sections);
  return out;
}

PromptBundle build_prompt(std::string_view question, std::span<const PromptSection> ranked,
                          const CodeSet& gold, std::span<const PromptSection> gold_texts,
                          const TokenCounter& counter, std::size_t budget, std::size_t k) {
  if (k == 0) throw invalid_argument("k must be at least 1");
  if (budget == 0) throw invalid_argument("token budget must be positive");

  const auto question_tokens = counter.count(render_prompt(question, {}));
  if (question_tokens > budget) {
    throw BudgetError(BudgetError::Reason::Question, question_tokens - budget);
  }

  // Candidate entries: ranked sections (first occurrence of a code wins),
  // then gold sections the retriever did not return.
  std::vector<Entry> entries;
  std::map<LawCode, std::size_t> by_code;
  for (const auto& s : ranked) {
    if (by_code.count(s.code)) continue;
    by_code.emplace(s.code, entries.size());
    entries.push_back({&s, entries.size(), gold.count(s.code) > 0, 0});
  }
  const std::size_t retrieved = entries.size();
  for (const auto& code : gold) {
    if (by_code.count(code)) continue;
    auto it = std::find_if(gold_texts.begin(), gold_texts.end(),
                           [&](const PromptSection& s) { return s.code == code; });
    if (it == gold_texts.end()) {
      throw invalid_argument("no text available for gold section " + to_string(code));
    }
    by_code.emplace(code, entries.size());
    entries.push_back({&*it, entries.size(), true, 0});
  }

  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto& e : entries) lines.push_back(render_context_line(*e.section));
  const auto line_tokens = counter.count_many(lines);
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].tokens = line_tokens[i];

  std::vector<Entry> gold_entries;
  for (const auto& e : entries) {
    if (e.gold) gold_entries.push_back(e);
  }
  const auto gold_tokens = counter.count(render_prompt(question, sections_of(gold_entries)));
  if (gold_tokens > budget) throw BudgetError(BudgetError::Reason::Gold, gold_tokens - budget);

  // Initial top-k with forced gold inclusion.
  std::vector<Entry> included;
  std::vector<bool> used(entries.size(), false);
  for (std::size_t i = 0; i < retrieved && included.size() < k; ++i) {
    included.push_back(entries[i]);
    used[i] = true;
  }
  for (const auto& g : gold_entries) {
    if (used[g.rank]) continue;
    if (included.size() >= k) {
      auto victim = std::find_if(included.rbegin(), included.rend(),
                                 [](const Entry& e) { return !e.gold; });
      if (victim != included.rend()) {
        used[victim->rank] = false;
        included.erase(std::next(victim).base());
      }
    }
    included.push_back(g);
    used[g.rank] = true;
    sort_by_rank(included);
  }

  std::vector<std::size_t> pool;  // unused non-gold entries, best rank first
  for (const auto& e : entries) {
    if (!used[e.rank] && !e.gold) pool.push_back(e.rank);
  }

  PromptBundle bundle;
  auto total_tokens = [&] { return counter.count(render_prompt(question, sections_of(included))); };
  std::size_t total = total_tokens();

  while (total > budget) {
    auto longest = included.end();
    for (auto it = included.begin(); it != included.end(); ++it) {
      if (it->gold) continue;
      if (longest == included.end() || it->tokens > longest->tokens ||
          (it->tokens == longest->tokens && it->rank > longest->rank)) {
        longest = it;
      }
    }
    if (longest == included.end()) {
      // Only reachable with a counter that is not subadditive over lines.
      throw BudgetError(BudgetError::Reason::Gold, total - budget);
    }
    included.erase(longest);
    total = total_tokens();
    if (total > budget) continue;

    const std::size_t slack = budget - total;
    auto fit = std::find_if(pool.begin(), pool.end(),
                            [&](std::size_t rank) { return entries[rank].tokens <= slack; });
    if (fit == pool.end()) continue;
    included.push_back(entries[*fit]);
    pool.erase(fit);
    sort_by_rank(included);
    ++bundle.replacements_made;
    total = total_tokens();
  }

  const auto sections = sections_of(included);
  bundle.text = render_prompt(question, sections);
  bundle.token_count = total;
  for (const auto& s : sections) bundle.included_codes.push_back(s.code);
  return bundle;
}

}  // namespace nitireward

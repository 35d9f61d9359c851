#include "nitireward/retrieval.hpp"

#include <algorithm>

#include "nitireward/error.hpp"

namespace nitireward {

Corpus::Corpus(std::vector<CorpusSection> sections) : sections_(std::move(sections)) {
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (!index_.emplace(sections_[i].code, i).second) {
      throw input_error("duplicate law code " + to_string(sections_[i].code) + " in corpus");
    }
  }
}

const CorpusSection* Corpus::find(LawCode code) const noexcept {
  const auto it = index_.find(code);
  return it == index_.end() ? nullptr : &sections_[it->second];
}

RetrievedSection score_section(const EmbeddingBundle& query, const CorpusSection& section,
                               const HeadWeights& w) {
  RetrievedSection r;
  r.code = section.code;
  r.heads = head_scores(query, section.embedding);
  r.fused = fuse(r.heads, w);
  return r;
}

std::vector<RetrievedSection> retrieve_topk(const EmbeddingBundle& query,
                                            std::span<const CorpusSection> corpus, std::size_t k,
                                            const HeadWeights& w) {
  if (k == 0) throw invalid_argument("k must be at least 1");

  std::vector<RetrievedSection> scored;
  scored.reserve(corpus.size());
  for (const auto& section : corpus) scored.push_back(score_section(query, section, w));

  auto better = [](const RetrievedSection& a, const RetrievedSection& b) {
    if (a.fused != b.fused) return a.fused > b.fused;
    return a.code < b.code;
  };
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    better);
  scored.resize(keep);
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = i + 1;
  return scored;
}

}  // namespace nitireward

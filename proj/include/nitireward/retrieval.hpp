#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nitireward/embedding.hpp"
#include "nitireward/law_code.hpp"

namespace nitireward {

struct CorpusSection {
  LawCode code;
  std::string text;
  EmbeddingBundle embedding;
};

struct RetrievedSection {
  LawCode code;
  HeadScores heads;
  double fused = 0.0;
  std::size_t rank = 0;  // 1-based; 0 until ranked
};

/// Read-only section collection with unique codes.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<CorpusSection> sections);  // throws on duplicate codes

  std::span<const CorpusSection> sections() const noexcept { return sections_; }
  const CorpusSection* find(LawCode code) const noexcept;
  std::size_t size() const noexcept { return sections_.size(); }
  bool empty() const noexcept { return sections_.empty(); }

 private:
  std::vector<CorpusSection> sections_;
  std::map<LawCode, std::size_t> index_;
};

RetrievedSection score_section(const EmbeddingBundle& query, const CorpusSection& section,
                               const HeadWeights& w);

/// Exhaustive scoring; the first min(k, |corpus|) sections ordered by
/// descending fused score, ties broken by ascending code.
std::vector<RetrievedSection> retrieve_topk(const EmbeddingBundle& query,
                                            std::span<const CorpusSection> corpus, std::size_t k,
                                            const HeadWeights& w);

}  // namespace nitireward

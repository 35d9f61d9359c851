#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nitireward {

/// Output of a multi-head embedder: one dense vector, a lexical sparse map
/// and per-token vectors for late interaction. Dense and token vectors are
/// unit-norm; sparse weights are non-negative.
struct EmbeddingBundle {
  std::vector<double> dense;
  std::map<std::uint64_t, double> sparse;
  std::vector<std::vector<double>> tokens;

  bool operator==(const EmbeddingBundle&) const = default;
};

inline constexpr double kUnitNormTolerance = 1e-6;

// Throws Error(InvalidArgument) when a bundle breaks its invariants.
void validate(const EmbeddingBundle& bundle);

class HeadWeights {
 public:
  HeadWeights() = default;
  HeadWeights(double dense, double sparse, double late);

  double dense() const noexcept { return dense_; }
  double sparse() const noexcept { return sparse_; }
  double late() const noexcept { return late_; }

  bool operator==(const HeadWeights&) const = default;

 private:
  double dense_ = 0.4;
  double sparse_ = 0.2;
  double late_ = 0.4;
};

struct HeadScores {
  double dense = 0.0;   // max(0, dense dot product)
  double sparse = 0.0;  // min(1, sparse dot product)
  double late = 0.0;    // MaxSim, per-token maxima clamped at 0
};

double dense_dot(std::span<const double> a, std::span<const double> b);
double sparse_dot(const EmbeddingBundle& a, const EmbeddingBundle& b) noexcept;

/// Mean over `query` tokens of the best cosine against any `doc` token, with
/// negative maxima clamped to 0. Zero when either side has no tokens.
/// Asymmetric: the mean runs over the first argument.
double maxsim(const std::vector<std::vector<double>>& query,
              const std::vector<std::vector<double>>& doc);

HeadScores head_scores(const EmbeddingBundle& a, const EmbeddingBundle& b);

// Weighted sum of head scores, clamped to [0, 1].
double fuse(const HeadScores& heads, const HeadWeights& w) noexcept;

double multi_head_similarity(const EmbeddingBundle& a, const EmbeddingBundle& b,
                             const HeadWeights& w);

class EmbedderClient {
 public:
  virtual ~EmbedderClient() = default;

  /// One bundle per input text, in input order. Transport failures surface
  /// as retryable Error(Upstream).
  virtual std::vector<EmbeddingBundle> embed(std::span<const std::string> texts) = 0;
};

/// Deterministic offline embedder built from hashed character trigrams.
///
/// Text is decoded as UTF-8 (an invalid byte stands for itself) and padded
/// with U+0002 / U+0003. Each trigram is hashed with 64-bit FNV-1a over its
/// code points as little-endian 32-bit words.
///  - dense: trigram counts bucketed by hash % 256, L2-normalised
///  - sparse: term id = hash >> 32, weight = tf / sqrt(total trigrams), so the
///    self dot product is >= 1
///  - tokens: one vector per 8-code-point window (padded trigram counts
///    bucketed by hash % 64, L2-normalised)
class HashNgramEmbedder final : public EmbedderClient {
 public:
  static constexpr std::size_t kDenseDim = 256;
  static constexpr std::size_t kTokenDim = 64;
  static constexpr std::size_t kTokenWindow = 8;

  EmbeddingBundle embed_one(std::string_view text) const;
  std::vector<EmbeddingBundle> embed(std::span<const std::string> texts) override;
};

}  // namespace nitireward

#include "nitireward/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "nitireward/error.hpp"
#include "nitireward/text.hpp"

namespace nitireward {
namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void normalize(std::vector<double>& v) {
  const double n = l2_norm(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

void check_unit(std::span<const double> v, const char* what) {
  if (v.empty()) throw invalid_argument(std::string(what) + " vector is empty");
  for (double x : v) {
    if (!std::isfinite(x)) throw invalid_argument(std::string(what) + " vector has non-finite entry");
  }
  const double n = l2_norm(v);
  if (std::abs(n - 1.0) > kUnitNormTolerance) {
    throw invalid_argument(std::string(what) + " vector is not unit-norm (norm " +
                           std::to_string(n) + ")");
  }
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;
constexpr char32_t kPadBegin = 0x02;
constexpr char32_t kPadEnd = 0x03;

std::uint64_t fnv1a(std::span<const char32_t> gram) {
  std::uint64_t h = kFnvOffset;
  for (char32_t cp : gram) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (static_cast<std::uint64_t>(cp) >> shift) & 0xFF;
      h *= kFnvPrime;
    }
  }
  return h;
}

// Hashes of the padded character trigrams of `cps`. A padded sequence shorter
// than three code points contributes itself as a single gram.
std::vector<std::uint64_t> trigram_hashes(std::span<const char32_t> cps) {
  std::vector<char32_t> padded;
  padded.reserve(cps.size() + 2);
  padded.push_back(kPadBegin);
  padded.insert(padded.end(), cps.begin(), cps.end());
  padded.push_back(kPadEnd);

  std::vector<std::uint64_t> hashes;
  if (padded.size() < 3) {
    hashes.push_back(fnv1a(padded));
    return hashes;
  }
  const std::span<const char32_t> all(padded);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) hashes.push_back(fnv1a(all.subspan(i, 3)));
  return hashes;
}

std::vector<double> bucket_counts(std::span<const std::uint64_t> hashes, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (auto h : hashes) v[h % dim] += 1.0;
  normalize(v);
  return v;
}

}  // namespace

void validate(const EmbeddingBundle& bundle) {
  check_unit(bundle.dense, "dense");
  for (const auto& [id, w] : bundle.sparse) {
    if (!std::isfinite(w) || w < 0.0) {
      throw invalid_argument("sparse weight for term " + std::to_string(id) + " is negative");
    }
  }
  for (const auto& t : bundle.tokens) check_unit(t, "token");
}

HeadWeights::HeadWeights(double dense, double sparse, double late)
    : dense_(dense), sparse_(sparse), late_(late) {
  for (double w : {dense, sparse, late}) {
    if (!std::isfinite(w) || w < 0.0) throw invalid_argument("head weights must be non-negative");
  }
  if (std::abs(dense + sparse + late - 1.0) > 1e-9) {
    throw invalid_argument("head weights must sum to 1");
  }
}

double dense_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw invalid_argument("dense dimension mismatch: " + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sparse_dot(const EmbeddingBundle& a, const EmbeddingBundle& b) noexcept {
  // merge-join over the ordered term ids
  double s = 0.0;
  auto ia = a.sparse.begin();
  auto ib = b.sparse.begin();
  while (ia != a.sparse.end() && ib != b.sparse.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double maxsim(const std::vector<std::vector<double>>& query,
              const std::vector<std::vector<double>>& doc) {
  if (query.empty() || doc.empty()) return 0.0;
  double total = 0.0;
  for (const auto& q : query) {
    double best = 0.0;
    for (const auto& d : doc) best = std::max(best, dense_dot(q, d));
    total += best;
  }
  return total / double(query.size());
}

HeadScores head_scores(const EmbeddingBundle& a, const EmbeddingBundle& b) {
  return {std::max(0.0, dense_dot(a.dense, b.dense)), std::min(1.0, sparse_dot(a, b)),
          maxsim(a.tokens, b.tokens)};
}

double fuse(const HeadScores& heads, const HeadWeights& w) noexcept {
  const double s = w.dense() * heads.dense + w.sparse() * heads.sparse + w.late() * heads.late;
  return std::clamp(s, 0.0, 1.0);
}

double multi_head_similarity(const EmbeddingBundle& a, const EmbeddingBundle& b,
                             const HeadWeights& w) {
  return fuse(head_scores(a, b), w);
}

EmbeddingBundle HashNgramEmbedder::embed_one(std::string_view text) const {
  const auto cps = decode_utf8(text);
  const auto hashes = trigram_hashes(cps);

  EmbeddingBundle out;
  out.dense = bucket_counts(hashes, kDenseDim);

  std::map<std::uint64_t, double> tf;
  for (auto h : hashes) tf[h >> 32] += 1.0;
  const double scale = 1.0 / std::sqrt(double(hashes.size()));
  for (auto& [id, count] : tf) out.sparse.emplace(id, count * scale);

  const std::span<const char32_t> all(cps);
  for (std::size_t i = 0; i < cps.size(); i += kTokenWindow) {
    const auto window = all.subspan(i, std::min(kTokenWindow, cps.size() - i));
    out.tokens.push_back(bucket_counts(trigram_hashes(window), kTokenDim));
  }
  return out;
}

std::vector<EmbeddingBundle> HashNgramEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingBundle> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

}  // namespace nitireward

#include "nitireward/eval.hpp"

#include <charconv>
#include <cmath>

#include "nitireward/answer_rewards.hpp"
#include "nitireward/citation_rewards.hpp"
#include "nitireward/error.hpp"
#include "nitireward/text.hpp"

namespace nitireward {
namespace {

template <typename F>
void for_each_field(EvalMetrics& m, F f) {
  f(m.citation_f1);
  f(m.coverage);
  f(m.consistency);
  f(m.joint);
}

// Adds one unit in the last place of a digit string; returns the carry.
bool increment_digits(std::string& digits) {
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it == '9') {
      *it = '0';
    } else {
      ++*it;
      return false;
    }
  }
  return true;
}

}  // namespace

double joint_score(double citation_f1, double coverage, double consistency) noexcept {
  return (citation_f1 + coverage + consistency) / 3.0;
}

EvalMetrics evaluate_record(const EvalRecord& record) {
  EvalMetrics m;
  if (record.predicted) {
    m.citation_f1 = citation_f1(to_code_set(record.predicted->citations), record.gold_citations).f1;
  }
  m.coverage = coverage_reward(record.coverage_label);
  m.consistency = 1.0 - contradiction_score(record.contradiction_label);
  m.joint = joint_score(m.citation_f1, m.coverage, m.consistency);
  return m;
}

EvalMetrics mean_metrics(std::span<const EvalMetrics> per_record) {
  if (per_record.empty()) throw invalid_argument("cannot average an empty run");
  EvalMetrics sum;
  for (const auto& m : per_record) {
    sum.citation_f1 += m.citation_f1;
    sum.coverage += m.coverage;
    sum.consistency += m.consistency;
    sum.joint += m.joint;
  }
  for_each_field(sum, [&](double& v) { v /= double(per_record.size()); });
  return sum;
}

RunAggregate aggregate_runs(std::span<const EvalMetrics> runs,
                            std::span<const std::uint64_t> seeds) {
  if (runs.empty()) throw invalid_argument("aggregate_runs needs at least one run");
  if (!seeds.empty() && seeds.size() != runs.size()) {
    throw invalid_argument("got " + std::to_string(seeds.size()) + " seeds for " +
                           std::to_string(runs.size()) + " runs");
  }

  RunAggregate agg;
  agg.run_count = runs.size();
  agg.mean = mean_metrics(runs);
  const double n = double(runs.size());
  auto sq_dev = [&](double EvalMetrics::*field) {
    double s = 0.0;
    for (const auto& r : runs) {
      const double d = r.*field - agg.mean.*field;
      s += d * d;
    }
    return std::sqrt(s / n);
  };
  agg.sd.citation_f1 = sq_dev(&EvalMetrics::citation_f1);
  agg.sd.coverage = sq_dev(&EvalMetrics::coverage);
  agg.sd.consistency = sq_dev(&EvalMetrics::consistency);
  agg.sd.joint = sq_dev(&EvalMetrics::joint);

  if (seeds.empty()) {
    for (std::size_t i = 0; i < runs.size(); ++i) agg.seeds.push_back(kDefaultSeeds[0] + i);
  } else {
    agg.seeds.assign(seeds.begin(), seeds.end());
  }
  return agg;
}

double gains_pct(double base, double updated) {
  if (!(base > 0.0)) throw invalid_argument("gain baseline must be positive");
  return 100.0 * (updated - base) / base;
}

double round_half_up(double value, int decimals) {
  if (!std::isfinite(value) || decimals < 0) return value;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, std::abs(value), std::chars_format::fixed);
  if (res.ec != std::errc()) return value;
  std::string repr(buf, res.ptr);

  const auto dot = repr.find('.');
  std::string int_part = dot == std::string::npos ? repr : repr.substr(0, dot);
  std::string frac = dot == std::string::npos ? std::string() : repr.substr(dot + 1);
  if (frac.size() <= static_cast<std::size_t>(decimals)) return value;

  const bool round_up = frac[static_cast<std::size_t>(decimals)] >= '5';
  frac.resize(static_cast<std::size_t>(decimals));
  std::string digits = int_part + frac;
  if (round_up && increment_digits(digits)) digits.insert(digits.begin(), '1');

  const auto int_len = digits.size() - frac.size();
  std::string rounded = digits.substr(0, int_len);
  if (!frac.empty()) rounded += "." + digits.substr(int_len);
  double out = 0.0;
  std::from_chars(rounded.data(), rounded.data() + rounded.size(), out);
  return std::signbit(value) ? -out : out;
}

double retriever_ceiling(std::span<const CodeSet> retrieved, std::span<const CodeSet> gold) {
  if (retrieved.size() != gold.size()) {
    throw invalid_argument("retrieved and gold lists differ in length (" +
                           std::to_string(retrieved.size()) + " vs " + std::to_string(gold.size()) +
                           ")");
  }
  if (retrieved.empty()) throw invalid_argument("retriever_ceiling needs at least one record");
  double sum = 0.0;
  for (std::size_t i = 0; i < retrieved.size(); ++i) sum += citation_f1(retrieved[i], gold[i]).f1;
  return sum / double(retrieved.size());
}

CorpusStats corpus_stats(std::span<const CorpusStatsRecord> records) {
  if (records.empty()) throw invalid_argument("corpus_stats needs a non-empty dataset");
  double chars = 0.0;
  double sections = 0.0;
  for (const auto& r : records) {
    chars += double(count_code_points(r.reference_answer));
    sections += double(r.gold_citations.size());
  }
  const double n = double(records.size());
  return {chars / n, sections / n};
}

}  // namespace nitireward

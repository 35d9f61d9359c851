#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nitireward/judge.hpp"
#include "nitireward/law_code.hpp"
#include "nitireward/structured_output.hpp"

namespace nitireward {

inline constexpr std::uint64_t kDefaultSeeds[] = {69420, 69421, 69422};

struct EvalRecord {
  std::string record_id;
  std::optional<ParsedResponse> predicted;  // absent when the completion failed to parse
  CodeSet gold_citations;
  CoverageLabel coverage_label = CoverageLabel::None;
  ContradictionLabel contradiction_label = ContradictionLabel::Contradicts;
};

struct EvalMetrics {
  double citation_f1 = 0.0;
  double coverage = 0.0;
  double consistency = 0.0;
  double joint = 0.0;
};

// Arithmetic mean of citation F1, coverage and consistency.
double joint_score(double citation_f1, double coverage, double consistency) noexcept;

EvalMetrics evaluate_record(const EvalRecord& record);

// Per-record (macro) mean of every metric. Throws on an empty run.
EvalMetrics mean_metrics(std::span<const EvalMetrics> per_record);

struct RunAggregate {
  EvalMetrics mean;
  EvalMetrics sd;  // population SD across runs
  std::size_t run_count = 0;
  std::vector<std::uint64_t> seeds;
};

/// Elementwise mean / population SD of per-run means. `seeds` defaults to
/// 69420, 69421, ... in run order.
RunAggregate aggregate_runs(std::span<const EvalMetrics> runs,
                            std::span<const std::uint64_t> seeds = {});

/// 100 * (new - base) / base. Throws Error(InvalidArgument) when base <= 0.
double gains_pct(double base, double updated);

/// Half-up rounding of the shortest decimal representation of `value`, so
/// 0.61375 rounds to 0.6138 even though the nearest double lies below it.
double round_half_up(double value, int decimals);

/// Macro-averaged citation F1 of retrieved sets against gold sets.
double retriever_ceiling(std::span<const CodeSet> retrieved, std::span<const CodeSet> gold);

struct CorpusStatsRecord {
  std::string reference_answer;
  CodeSet gold_citations;
};

struct CorpusStats {
  double avg_answer_chars = 0.0;  // Unicode code points
  double avg_sections_per_answer = 0.0;
};

CorpusStats corpus_stats(std::span<const CorpusStatsRecord> records);

}  // namespace nitireward

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nitireward/answer_rewards.hpp"
#include "nitireward/eval.hpp"
#include "nitireward/prompt_builder.hpp"
#include "nitireward/retrieval.hpp"
#include "nitireward/rollout_scoring.hpp"
#include "nitireward/toy_bandit.hpp"

namespace nitireward {

using json = nlohmann::json;

// Decoders are strict: wrong types, missing required fields and unknown
// fields raise Error(Input) naming the JSON path, e.g. "$.groups[1].completions".

json to_json(const EmbeddingBundle& b);
EmbeddingBundle embedding_from_json(const json& j, const std::string& path = "$");

json to_json(const CorpusSection& s);
CorpusSection corpus_section_from_json(const json& j, const std::string& path = "$");

json to_json(const RetrievedSection& r);
json to_json(const CitationRewardBreakdown& b);
json to_json(const RewardBreakdown& b);
json to_json(const GrpoLossResult& l);
json to_json(const EvalMetrics& m);
json to_json(const RunAggregate& a);
json to_json(const CurvePoint& p);
json to_json(const PromptBundle& p);

json to_json(const ScoreGroup& g);
ScoreGroup score_group_from_json(const json& j, const std::string& path = "$");

json to_json(const ScoreRequest& r);
ScoreRequest score_request_from_json(const json& j);

json to_json(const ScoreResponse& r);

/// Run-file row: {record_id, raw_completion, gold_citations, coverage_label,
/// contradiction_label}; the completion is parsed with `order`.
EvalRecord eval_record_from_json(const json& j, BlockOrder order, const std::string& path = "$");

std::vector<LawCode> law_codes_from_json(const json& j, const std::string& path);
json to_json(std::span<const LawCode> codes);

/// One JSON value per non-blank line; errors carry the file name and line.
std::vector<json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<json>& rows);

/// JSON Schema documents for the /v1/score request and response bodies.
json score_request_schema();
json score_response_schema();

}  // namespace nitireward

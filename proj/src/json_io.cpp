#include "nitireward/json_io.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "nitireward/error.hpp"

namespace nitireward {
namespace {

std::string type_name(const json& j) { return j.type_name(); }

// Field access on one JSON object; finish() rejects fields nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw input_error(path_ + ": expected object, got " + type_name(j_));
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw input_error(child(key) + ": required field is missing");
    return *v;
  }

  std::string string(const std::string& key) { return as_string(require(key), child(key)); }

  std::optional<std::string> opt_string(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_string(*v, child(key));
  }

  bool boolean(const std::string& key) {
    const json& v = require(key);
    if (!v.is_boolean()) throw input_error(child(key) + ": expected boolean, got " + type_name(v));
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) { return as_numbers(require(key), child(key)); }

  std::optional<std::vector<double>> opt_numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_numbers(*v, child(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw input_error(child(key) + ": unknown field");
    }
  }

  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw input_error(path + ": expected string, got " + type_name(v));
    return v.get<std::string>();
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw input_error(path + ": expected number, got " + type_name(v));
    return v.get<double>();
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) throw input_error(path + ": expected array, got " + type_name(v));
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<std::vector<double>> number_matrix(const json& v, const std::string& path) {
  if (!v.is_array()) throw input_error(path + ": expected array, got " + type_name(v));
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ObjectReader::as_numbers(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::uint64_t unsigned_from_json(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw input_error(path + ": expected non-negative integer, got " + v.dump());
}

}  // namespace

std::vector<LawCode> law_codes_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw input_error(path + ": expected array of law codes, got " + type_name(j));
  std::vector<LawCode> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(LawCode{unsigned_from_json(j[i], path + "[" + std::to_string(i) + "]")});
  }
  return out;
}

json to_json(std::span<const LawCode> codes) {
  json arr = json::array();
  for (const auto& c : codes) arr.push_back(c.value);
  return arr;
}

json to_json(const EmbeddingBundle& b) {
  json sparse = json::object();
  for (const auto& [id, w] : b.sparse) sparse[std::to_string(id)] = w;
  return {{"dense", b.dense}, {"sparse", sparse}, {"tokens", b.tokens}};
}

EmbeddingBundle embedding_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  EmbeddingBundle b;
  b.dense = r.numbers("dense");
  if (const json* sparse = r.find("sparse")) {
    if (!sparse->is_object()) throw input_error(r.child("sparse") + ": expected object");
    for (const auto& [key, value] : sparse->items()) {
      const auto code = parse_law_code(key);  // same digit rules as term ids
      if (!code) throw input_error(r.child("sparse") + ": term id '" + key + "' is not an integer");
      b.sparse[code->value] = ObjectReader::as_number(value, r.child("sparse") + "." + key);
    }
  }
  if (const json* tokens = r.find("tokens")) b.tokens = number_matrix(*tokens, r.child("tokens"));
  r.finish();
  try {
    validate(b);
  } catch (const Error& e) {
    throw input_error(path + ": " + e.what());
  }
  return b;
}

json to_json(const CorpusSection& s) {
  json j = to_json(s.embedding);
  j["code"] = s.code.value;
  j["text"] = s.text;
  return j;
}

CorpusSection corpus_section_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw input_error(path + ": expected object");
  CorpusSection s;
  s.code = LawCode{unsigned_from_json(j.contains("code") ? j["code"] : json(), path + ".code")};
  if (!j.contains("text") || !j["text"].is_string()) {
    throw input_error(path + ".text: required string field is missing");
  }
  s.text = j["text"].get<std::string>();
  json rest = j;
  rest.erase("code");
  rest.erase("text");
  s.embedding = embedding_from_json(rest, path);
  return s;
}

json to_json(const RetrievedSection& r) {
  return {{"code", r.code.value},
          {"dense", r.heads.dense},
          {"sparse", r.heads.sparse},
          {"late", r.heads.late},
          {"fused", r.fused},
          {"rank", r.rank}};
}

json to_json(const CitationRewardBreakdown& b) {
  return {{"format", b.format},
          {"format_pass", b.format_pass},
          {"non_hallucination", b.non_hallucination},
          {"halluc_pass", b.halluc_pass},
          {"citation_f1", b.citation_f1},
          {"subtotal", b.subtotal}};
}

json to_json(const RewardBreakdown& b) {
  json j = {{"citation", to_json(b.citation)}};
  if (b.semantic) j["semantic"] = *b.semantic;
  if (b.coverage) j["coverage"] = *b.coverage;
  if (b.consistency) j["consistency"] = *b.consistency;
  j["total"] = b.total;
  return j;
}

json to_json(const GrpoLossResult& l) {
  return {{"value", l.loss}, {"ratios", l.ratios}, {"clipped", l.clipped}, {"kl", l.kl}};
}

json to_json(const EvalMetrics& m) {
  return {{"citation_f1", m.citation_f1},
          {"coverage", m.coverage},
          {"consistency", m.consistency},
          {"joint", m.joint}};
}

json to_json(const RunAggregate& a) {
  return {{"mean", to_json(a.mean)},
          {"sd", to_json(a.sd)},
          {"run_count", a.run_count},
          {"seeds", a.seeds}};
}

json to_json(const CurvePoint& p) {
  return {{"iteration", p.iteration}, {"expected_reward", p.expected_reward}, {"entropy", p.entropy}};
}

json to_json(const PromptBundle& p) {
  return {{"text", p.text},
          {"included_codes", to_json(p.included_codes)},
          {"token_count", p.token_count},
          {"replacements_made", p.replacements_made}};
}

json to_json(const ScoreGroup& g) {
  json j = {{"prompt_id", g.prompt_id}};
  if (g.question) j["question"] = *g.question;
  j["gold_citations"] = to_json(g.gold_citations);
  j["context_codes"] = to_json(g.context_codes);
  j["reference_answer"] = g.reference_answer;
  j["completions"] = g.completions;
  if (g.logp_new) j["logp_new"] = *g.logp_new;
  if (g.logp_old) j["logp_old"] = *g.logp_old;
  if (g.logp_ref) j["logp_ref"] = *g.logp_ref;
  return j;
}

ScoreGroup score_group_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ScoreGroup g;
  g.prompt_id = r.string("prompt_id");
  g.question = r.opt_string("question");
  g.gold_citations = law_codes_from_json(r.require("gold_citations"), r.child("gold_citations"));
  g.context_codes = law_codes_from_json(r.require("context_codes"), r.child("context_codes"));
  g.reference_answer = r.string("reference_answer");
  const json& completions = r.require("completions");
  if (!completions.is_array()) throw input_error(r.child("completions") + ": expected array");
  for (std::size_t i = 0; i < completions.size(); ++i) {
    g.completions.push_back(ObjectReader::as_string(
        completions[i], r.child("completions") + "[" + std::to_string(i) + "]"));
  }
  g.logp_new = r.opt_numbers("logp_new");
  g.logp_old = r.opt_numbers("logp_old");
  g.logp_ref = r.opt_numbers("logp_ref");
  r.finish();
  return g;
}

json to_json(const ScoreRequest& r) {
  json j = json::object();
  if (r.mode) j["mode"] = std::string(to_string(*r.mode));
  if (r.order) j["order"] = std::string(to_string(*r.order));
  json groups = json::array();
  for (const auto& g : r.groups) groups.push_back(to_json(g));
  j["groups"] = std::move(groups);
  return j;
}

ScoreRequest score_request_from_json(const json& j) {
  ObjectReader r(j, "$");
  ScoreRequest req;
  if (auto mode = r.opt_string("mode")) {
    req.mode = parse_reward_mode(*mode);
    if (!req.mode) throw input_error("$.mode: unknown reward mode '" + *mode + "'");
  }
  if (auto order = r.opt_string("order")) {
    req.order = parse_block_order(*order);
    if (!req.order) throw input_error("$.order: unknown block order '" + *order + "'");
  }
  const json& groups = r.require("groups");
  if (!groups.is_array()) throw input_error("$.groups: expected array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    req.groups.push_back(score_group_from_json(groups[i], "$.groups[" + std::to_string(i) + "]"));
  }
  r.finish();
  return req;
}

json to_json(const ScoreResponse& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    json rewards = json::array();
    for (const auto& b : g.rewards) rewards.push_back(to_json(b));
    json gj = {{"prompt_id", g.prompt_id}, {"rewards", rewards}, {"advantages", g.advantages}};
    if (g.loss) gj["loss"] = to_json(*g.loss);
    groups.push_back(std::move(gj));
  }
  return {{"mode", std::string(to_string(r.mode))},
          {"order", std::string(to_string(r.order))},
          {"groups", groups}};
}

EvalRecord eval_record_from_json(const json& j, BlockOrder order, const std::string& path) {
  ObjectReader r(j, path);
  EvalRecord rec;
  const json& id = r.require("record_id");
  rec.record_id = id.is_string() ? id.get<std::string>() : id.dump();
  const auto completion = r.string("raw_completion");
  rec.predicted = parse_response(completion, order).response;
  rec.gold_citations = to_code_set(
      law_codes_from_json(r.require("gold_citations"), r.child("gold_citations")));

  auto label_text = [](const json& v) {
    return v.is_string() ? v.get<std::string>() : (v.is_number_integer() ? v.dump() : std::string());
  };
  const json& cov = r.require("coverage_label");
  const auto coverage = parse_coverage_label(label_text(cov));
  if (!coverage) throw input_error(r.child("coverage_label") + ": invalid label " + cov.dump());
  rec.coverage_label = *coverage;
  const json& con = r.require("contradiction_label");
  const auto contradiction = parse_contradiction_label(label_text(con));
  if (!contradiction) {
    throw input_error(r.child("contradiction_label") + ": invalid label " + con.dump());
  }
  rec.contradiction_label = *contradiction;
  r.finish();
  return rec;
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw input_error(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::string& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw input_error("cannot write '" + path + "'");
  for (const auto& row : rows) out << row.dump() << '\n';
}

json score_request_schema() {
  static const json schema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "ScoreRequest",
  "type": "object",
  "additionalProperties": false,
  "required": ["groups"],
  "properties": {
    "mode": {"enum": ["semantic", "covcon", "combined", "citation_only"]},
    "order": {"enum": ["reasoning_answer_citation", "reasoning_citation_answer"]},
    "groups": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["prompt_id", "gold_citations", "context_codes", "reference_answer", "completions"],
        "properties": {
          "prompt_id": {"type": "string"},
          "question": {"type": "string"},
          "gold_citations": {"type": "array", "items": {"type": "integer", "minimum": 0}},
          "context_codes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
          "reference_answer": {"type": "string"},
          "completions": {"type": "array", "minItems": 2, "items": {"type": "string"}},
          "logp_new": {"type": "array", "items": {"type": "number"}},
          "logp_old": {"type": "array", "items": {"type": "number"}},
          "logp_ref": {"type": "array", "items": {"type": "number"}}
        }
      }
    }
  }
})");
  return schema;
}

json score_response_schema() {
  static const json schema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "ScoreResponse",
  "type": "object",
  "required": ["mode", "order", "groups"],
  "properties": {
    "mode": {"enum": ["semantic", "covcon", "combined", "citation_only"]},
    "order": {"enum": ["reasoning_answer_citation", "reasoning_citation_answer"]},
    "groups": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["prompt_id", "rewards", "advantages"],
        "properties": {
          "prompt_id": {"type": "string"},
          "rewards": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["citation", "total"],
              "properties": {
                "citation": {
                  "type": "object",
                  "required": ["format", "format_pass", "non_hallucination", "halluc_pass", "citation_f1", "subtotal"],
                  "properties": {
                    "format": {"type": "number", "minimum": 0, "maximum": 1},
                    "format_pass": {"type": "boolean"},
                    "non_hallucination": {"enum": [0, 0.5]},
                    "halluc_pass": {"type": "boolean"},
                    "citation_f1": {"type": "number", "minimum": 0, "maximum": 1},
                    "subtotal": {"type": "number", "minimum": 0, "maximum": 2.5}
                  }
                },
                "semantic": {"type": "number", "minimum": 0, "maximum": 1},
                "coverage": {"enum": [0, 0.5, 1]},
                "consistency": {"enum": [0, 1]},
                "total": {"type": "number", "minimum": 0}
              }
            }
          },
          "advantages": {"type": "array", "items": {"type": "number"}},
          "loss": {
            "type": "object",
            "required": ["value", "ratios", "clipped", "kl"],
            "properties": {
              "value": {"type": "number"},
              "ratios": {"type": "array", "items": {"type": "number"}},
              "clipped": {"type": "array", "items": {"type": "boolean"}},
              "kl": {"type": "array", "items": {"type": "number"}}
            }
          }
        }
      }
    }
  }
})");
  return schema;
}

}  // namespace nitireward

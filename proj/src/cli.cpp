#include "nitireward/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nitireward/citation_rewards.hpp"
#include "nitireward/config.hpp"
#include "nitireward/json_io.hpp"
#include "nitireward/prompt_builder.hpp"
#include "nitireward/retrieval.hpp"
#include "nitireward/service.hpp"
#include "nitireward/toy_bandit.hpp"

#ifndef NITIREWARD_VERSION
#define NITIREWARD_VERSION "0.0.0"
#endif

namespace nitireward {
namespace {

// Options shared by every subcommand that needs a configuration.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> set;
  std::string mode;
  std::string order;
  std::string backends;

  void attach(CLI::App* cmd, bool scoring) {
    cmd->add_option("--config", file, "TOML configuration file");
    cmd->add_option("--set", set, "override a configuration key (key=value)");
    cmd->add_option("--backends", backends, "mock | http");
    if (scoring) {
      cmd->add_option("--mode", mode, "semantic | covcon | combined | citation_only");
      cmd->add_option("--order", order,
                      "reasoning_answer_citation | reasoning_citation_answer");
    }
  }

  ServiceConfig load() const {
    auto assignments = set;
    if (!backends.empty()) assignments.push_back("backends=" + backends);
    if (!mode.empty()) assignments.push_back("mode=" + mode);
    if (!order.empty()) assignments.push_back("order=" + order);
    return load_config(file.empty() ? std::nullopt : std::optional(file), assignments);
  }
};

// "-" or empty means the given stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::trunc);
      if (!file_) throw input_error("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

  void line(const json& row) { *stream_ << row.dump() << '\n'; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::string row_path(const std::string& file, std::size_t i) {
  return file + "[" + std::to_string(i) + "]";
}

Corpus load_corpus(const std::string& path) {
  const auto rows = read_jsonl(path);
  std::vector<CorpusSection> sections;
  sections.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sections.push_back(corpus_section_from_json(rows[i], row_path(path, i)));
  }
  try {
    return Corpus(std::move(sections));
  } catch (const Error& e) {
    throw input_error(path + ": " + e.what());
  }
}

std::string require_string(const json& row, const std::string& key, const std::string& path) {
  if (!row.is_object() || !row.contains(key) || !row[key].is_string()) {
    throw input_error(path + "." + key + ": required string field is missing");
  }
  return row[key].get<std::string>();
}

std::string id_of(const json& row, const std::string& key) {
  if (!row.contains(key)) return {};
  return row[key].is_string() ? row[key].get<std::string>() : row[key].dump();
}

int cmd_score(const ConfigFlags& flags, const std::string& in, const std::string& out_path,
              std::ostream& out) {
  const auto cfg = flags.load();
  const auto backends = make_backends(cfg);
  const auto rows = read_jsonl(in);
  ScoreRequest request;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    request.groups.push_back(score_group_from_json(rows[i], row_path(in, i)));
  }
  const auto response = score_request(request, backends.scoring_context(cfg));

  Output o(out_path, out);
  for (const auto& g : response.groups) {
    for (std::size_t i = 0; i < g.rewards.size(); ++i) {
      json row = to_json(g.rewards[i]);
      row["prompt_id"] = g.prompt_id;
      row["completion_index"] = i;
      row["advantage"] = g.advantages[i];
      o.line(row);
    }
  }
  return kExitOk;
}

int cmd_evaluate(const std::vector<std::string>& runs, const std::string& order_name,
                 const std::vector<std::uint64_t>& seeds, const std::string& format,
                 const std::string& out_path, std::ostream& out) {
  const auto order = parse_block_order(order_name);
  if (!order) throw config_error("unknown block order '" + order_name + "'");
  if (!seeds.empty() && seeds.size() != runs.size()) {
    throw config_error("--seeds needs one seed per run file");
  }

  json per_run = json::array();
  std::vector<EvalMetrics> run_means;
  for (const auto& path : runs) {
    const auto rows = read_jsonl(path);
    std::vector<EvalMetrics> per_record;
    per_record.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      per_record.push_back(evaluate_record(eval_record_from_json(rows[i], *order, row_path(path, i))));
    }
    if (per_record.empty()) throw input_error(path + ": run file has no records");
    run_means.push_back(mean_metrics(per_record));
    per_run.push_back({{"file", path}, {"records", rows.size()}, {"metrics", to_json(run_means.back())}});
  }
  const auto aggregate = aggregate_runs(run_means, seeds);

  Output o(out_path, out);
  if (format == "table") {
    *o << report_table(aggregate);
  } else {
    *o << json{{"runs", per_run}, {"aggregate", to_json(aggregate)}}.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_retrieve(const ConfigFlags& flags, const std::string& corpus_path, const std::string& in,
                 std::size_t k, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  const auto cfg = flags.load();
  const auto corpus = load_corpus(corpus_path);
  const auto rows = read_jsonl(in);
  const std::size_t top_k = k ? k : cfg.top_k;

  std::unique_ptr<Backends> backends;
  Output o(out_path, out);
  double f1_sum = 0.0;
  std::size_t with_gold = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto path = row_path(in, i);
    const auto& row = rows[i];
    if (!row.is_object()) throw input_error(path + ": expected object");
    EmbeddingBundle query;
    if (row.contains("embedding")) {
      query = embedding_from_json(row["embedding"], path + ".embedding");
    } else {
      const std::string text = require_string(row, "text", path);
      if (!backends) backends = std::make_unique<Backends>(make_backends(cfg));
      if (!backends->embedder) throw config_error("retrieval from text needs an embedder");
      query = backends->embedder->embed(std::span(&text, 1)).at(0);
    }
    const auto hits = retrieve_topk(query, corpus.sections(), top_k, cfg.weights);
    json results = json::array();
    CodeSet retrieved;
    for (const auto& h : hits) {
      results.push_back(to_json(h));
      retrieved.insert(h.code);
    }
    json line = {{"query_id", id_of(row, "query_id")}, {"results", results}};
    if (row.contains("gold_citations")) {
      const auto gold = to_code_set(law_codes_from_json(row["gold_citations"], path + ".gold_citations"));
      const double f1 = citation_f1(retrieved, gold).f1;
      line["retrieved_f1"] = f1;
      f1_sum += f1;
      ++with_gold;
    }
    o.line(line);
  }
  if (with_gold) {
    err << "retriever ceiling (macro citation F1) over " << with_gold
        << " queries: " << f1_sum / double(with_gold) << '\n';
  }
  return kExitOk;
}

int cmd_build_prompt(const ConfigFlags& flags, const std::string& corpus_path, const std::string& in,
                     const std::string& out_path, std::ostream& out) {
  const auto cfg = flags.load();
  const auto corpus = load_corpus(corpus_path);
  const auto backends = make_backends(cfg);
  const auto rows = read_jsonl(in);

  auto section_of = [&](LawCode code, const std::string& path) {
    const auto* s = corpus.find(code);
    if (!s) throw input_error(path + ": law code " + std::to_string(code.value) + " is not in the corpus");
    return PromptSection{s->code, s->text};
  };

  Output o(out_path, out);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto path = row_path(in, i);
    const auto& row = rows[i];
    const auto question = require_string(row, "question", path);
    const auto gold_codes = row.contains("gold_citations")
                                ? law_codes_from_json(row["gold_citations"], path + ".gold_citations")
                                : std::vector<LawCode>{};

    std::vector<PromptSection> ranked;
    if (row.contains("ranked")) {
      for (const auto& code : law_codes_from_json(row["ranked"], path + ".ranked")) {
        ranked.push_back(section_of(code, path + ".ranked"));
      }
    } else {
      if (!backends.embedder) throw config_error("ranking without 'ranked' codes needs an embedder");
      const auto query = backends.embedder->embed(std::span(&question, 1)).at(0);
      for (const auto& h : retrieve_topk(query, corpus.sections(), corpus.size(), cfg.weights)) {
        ranked.push_back(section_of(h.code, path));
      }
    }
    std::vector<PromptSection> gold_texts;
    for (const auto& code : gold_codes) gold_texts.push_back(section_of(code, path + ".gold_citations"));

    json line = {{"prompt_id", id_of(row, "prompt_id")}};
    try {
      const auto bundle = build_prompt(question, ranked, to_code_set(gold_codes), gold_texts,
                                       *backends.counter, cfg.budget, cfg.top_k);
      line.update(to_json(bundle));
    } catch (const BudgetError& e) {
      line["error"] = {{"kind", "budget"},
                       {"reason", e.reason() == BudgetError::Reason::Question ? "question" : "gold"},
                       {"overflow", e.overflow()},
                       {"message", e.what()}};
    }
    o.line(line);
  }
  return kExitOk;
}

int cmd_embed_corpus(const ConfigFlags& flags, const std::string& in, std::size_t batch,
                     const std::string& out_path, std::ostream& out) {
  const auto cfg = flags.load();
  const auto backends = make_backends(cfg);
  if (!backends.embedder) throw config_error("embed-corpus needs an embedder");
  if (batch == 0) throw config_error("--batch must be at least 1");
  const auto rows = read_jsonl(in);

  std::vector<CorpusSection> sections;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto path = row_path(in, i);
    if (!rows[i].is_object() || !rows[i].contains("code")) throw input_error(path + ".code: required");
    const auto code = law_codes_from_json(json::array({rows[i]["code"]}), path + ".code").front();
    sections.push_back({code, require_string(rows[i], "text", path), {}});
  }
  try {
    Corpus{sections};  // rejects duplicate codes before any upstream call
  } catch (const Error& e) {
    throw input_error(in + ": " + e.what());
  }

  for (std::size_t start = 0; start < sections.size(); start += batch) {
    const std::size_t end = std::min(sections.size(), start + batch);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) texts.push_back(sections[i].text);
    auto bundles = backends.embedder->embed(texts);
    if (bundles.size() != texts.size()) {
      throw Error(ErrorKind::UpstreamReply, "embedder returned the wrong number of embeddings");
    }
    for (std::size_t i = start; i < end; ++i) sections[i].embedding = std::move(bundles[i - start]);
  }

  Output o(out_path, out);
  for (const auto& s : sections) o.line(to_json(s));
  return kExitOk;
}

int cmd_toy_train(const ConfigFlags& flags, int iters, std::uint64_t seed, double lr,
                  const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto cfg = flags.load();
  const auto backends = make_backends(cfg);
  auto spec = ToyBanditSpec::citation_bandit();
  spec.mode = cfg.mode;
  spec.order = cfg.order;
  spec.iterations = iters;
  spec.seed = seed;
  spec.group_size = cfg.grpo.group_size;
  if (lr >= 0.0) spec.learning_rate = lr;
  if ((needs_embedder(spec.mode) && !backends.embedder) || (needs_judge(spec.mode) && !backends.judge)) {
    throw config_error("mode '" + std::string(to_string(spec.mode)) + "' needs backends that are not configured");
  }
  MockJudge unused_judge;
  HashNgramEmbedder unused_embedder;
  const auto result = train_toy_bandit(
      spec, backends.embedder ? *backends.embedder : static_cast<EmbedderClient&>(unused_embedder),
      backends.judge ? *backends.judge : static_cast<JudgeClient&>(unused_judge), cfg.weights);

  Output o(out_path, out);
  for (const auto& p : result.curve) o.line(to_json(p));
  const double final_reward = result.curve.back().expected_reward;
  err << "final expected reward " << final_reward << " of max " << result.max_reward << " ("
      << std::fixed << std::setprecision(1) << 100.0 * final_reward / result.max_reward << "%)\n"
      << std::defaultfloat;
  return kExitOk;
}

int cmd_stats(const std::string& in, std::ostream& out) {
  const auto rows = read_jsonl(in);
  std::vector<CorpusStatsRecord> records;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto path = row_path(in, i);
    CorpusStatsRecord r;
    r.reference_answer = require_string(rows[i], "reference_answer", path);
    if (!rows[i].contains("gold_citations")) throw input_error(path + ".gold_citations: required");
    r.gold_citations = to_code_set(law_codes_from_json(rows[i]["gold_citations"], path + ".gold_citations"));
    records.push_back(std::move(r));
  }
  const auto stats = corpus_stats(records);
  out << json{{"records", records.size()},
              {"avg_answer_chars", stats.avg_answer_chars},
              {"avg_sections_per_answer", stats.avg_sections_per_answer}}
             .dump(2)
      << '\n';
  return kExitOk;
}

int cmd_serve(const ConfigFlags& flags, const std::string& host, int port, std::ostream& err) {
  auto assignments = flags;
  if (!host.empty()) assignments.set.push_back("listen_host=" + host);
  if (port >= 0) assignments.set.push_back("listen_port=" + std::to_string(port));
  auto cfg = assignments.load();
  ScoringService service(cfg, make_backends(cfg));
  service.run([&](int bound) {
    err << "listening on http://" << cfg.listen_host << ":" << bound << " (mode "
        << to_string(cfg.mode) << ")" << std::endl;
  });
  return kExitOk;
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
      return kExitConfig;
    case ErrorKind::Upstream:
    case ErrorKind::UpstreamReply:
      return kExitUpstream;
    case ErrorKind::Input:
    case ErrorKind::InvalidArgument:
      return kExitInput;
  }
  return kExitFailure;
}

std::string report_table(const RunAggregate& a) {
  struct Row {
    const char* name;
    double mean;
    double sd;
  };
  const Row rows[] = {{"citation_f1", a.mean.citation_f1, a.sd.citation_f1},
                      {"coverage", a.mean.coverage, a.sd.coverage},
                      {"consistency", a.mean.consistency, a.sd.consistency},
                      {"joint", a.mean.joint, a.sd.joint}};
  std::ostringstream os;
  os << std::left << std::setw(14) << "metric" << std::right << std::setw(10) << "mean"
     << std::setw(10) << "sd" << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << r.name << std::right << std::setw(10)
       << round_half_up(r.mean, 4) << std::setw(10) << round_half_up(r.sd, 4) << '\n';
  }
  os << "runs: " << a.run_count << '\n';
  return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gated citation and answer rewards for GRPO training on legal QA"};
  app.name("nitireward");
  app.set_version_flag("--version", NITIREWARD_VERSION);
  bool schema = false;
  app.add_flag("--schema", schema, "print the JSON Schemas of the /v1/score bodies");
  app.require_subcommand(0, 1);

  ConfigFlags serve_flags, score_flags, retrieve_flags, prompt_flags, embed_flags, toy_flags;

  auto* serve = app.add_subcommand("serve", "run the HTTP scoring service");
  serve_flags.attach(serve, true);
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port (0 picks a free one)");

  auto* score = app.add_subcommand("score", "score rollout groups from JSONL");
  score_flags.attach(score, true);
  std::string score_in, score_out;
  score->add_option("--in", score_in, "rollout groups, one per line")->required();
  score->add_option("--out", score_out, "rewards JSONL (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "aggregate evaluation runs");
  std::vector<std::string> runs;
  std::string eval_order = "reasoning_answer_citation", format = "json", eval_out;
  std::vector<std::uint64_t> seeds;
  evaluate->add_option("--runs", runs, "run files")->required();
  evaluate->add_option("--order", eval_order, "block order of the completions");
  evaluate->add_option("--seeds", seeds, "seed of each run");
  evaluate->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
  evaluate->add_option("--out", eval_out, "report file (default stdout)");

  auto* retrieve = app.add_subcommand("retrieve", "rank corpus sections for queries");
  retrieve_flags.attach(retrieve, false);
  std::string corpus_path, retrieve_in, retrieve_out;
  std::size_t k = 0;
  retrieve->add_option("--corpus", corpus_path, "embedded corpus JSONL")->required();
  retrieve->add_option("--in", retrieve_in, "queries JSONL")->required();
  retrieve->add_option("--k", k, "results per query (default top_k)");
  retrieve->add_option("--out", retrieve_out, "results JSONL (default stdout)");

  auto* prompt = app.add_subcommand("build-prompt", "pack retrieved sections into prompts");
  prompt_flags.attach(prompt, false);
  std::string prompt_corpus, prompt_in, prompt_out;
  prompt->add_option("--corpus", prompt_corpus, "embedded corpus JSONL")->required();
  prompt->add_option("--in", prompt_in, "prompt requests JSONL")->required();
  prompt->add_option("--out", prompt_out, "prompt bundles JSONL (default stdout)");

  auto* embed = app.add_subcommand("embed-corpus", "attach embeddings to corpus sections");
  embed_flags.attach(embed, false);
  std::string embed_in, embed_out;
  std::size_t batch = 64;
  embed->add_option("--in", embed_in, "sections JSONL {code, text}")->required();
  embed->add_option("--batch", batch, "texts per embedder call");
  embed->add_option("--out", embed_out, "corpus JSONL (default stdout)");

  auto* toy = app.add_subcommand("toy-train", "train the citation bandit with GRPO");
  toy_flags.attach(toy, true);
  int iters = 200;
  std::uint64_t seed = 69420;
  double lr = -1.0;
  std::string toy_out;
  toy->add_option("--iters", iters, "training iterations");
  toy->add_option("--seed", seed, "sampling seed");
  toy->add_option("--lr", lr, "learning rate (default 0.1)");
  toy->add_option("--out", toy_out, "learning curve JSONL (default stdout)");

  auto* stats = app.add_subcommand("stats", "answer length and citation count statistics");
  std::string stats_in;
  stats->add_option("--in", stats_in, "records JSONL {reference_answer, gold_citations}")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (schema) {
      out << json{{"request", score_request_schema()}, {"response", score_response_schema()}}.dump(2)
          << '\n';
      return kExitOk;
    }
    if (*serve) return cmd_serve(serve_flags, host, port, err);
    if (*score) return cmd_score(score_flags, score_in, score_out, out);
    if (*evaluate) return cmd_evaluate(runs, eval_order, seeds, format, eval_out, out);
    if (*retrieve) return cmd_retrieve(retrieve_flags, corpus_path, retrieve_in, k, retrieve_out, out, err);
    if (*prompt) return cmd_build_prompt(prompt_flags, prompt_corpus, prompt_in, prompt_out, out);
    if (*embed) return cmd_embed_corpus(embed_flags, embed_in, batch, embed_out, out);
    if (*toy) return cmd_toy_train(toy_flags, iters, seed, lr, toy_out, out, err);
    if (*stats) return cmd_stats(stats_in, out);
    err << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace nitireward

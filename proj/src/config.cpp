#include "nitireward/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <sstream>

#include <toml.hpp>

#include "nitireward/error.hpp"

extern char** environ;

namespace nitireward {
namespace {

constexpr std::string_view kEnvPrefix = "NITIREWARD_";

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw config_error(key + ": '" + v + "' is not a number");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& v, long long lo, long long hi) {
  long long out = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw config_error(key + ": '" + v + "' is not an integer");
  }
  if (out < lo || out > hi) {
    throw config_error(key + ": " + v + " is outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  return out;
}

std::optional<std::string> optional_text(const std::string& v) {
  if (v.empty()) return std::nullopt;
  return v;
}

// Intermediate state: weights are assembled at the end so partial layers can
// override one head at a time.
struct Draft {
  ServiceConfig cfg;
  double dense = 0.4;
  double sparse = 0.2;
  double late = 0.4;
};

using Setter = std::function<void(Draft&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"mode",
       [](Draft& d, const std::string& k, const std::string& v) {
         auto m = parse_reward_mode(v);
         if (!m) throw config_error(k + ": unknown reward mode '" + v + "'");
         d.cfg.mode = *m;
       }},
      {"order",
       [](Draft& d, const std::string& k, const std::string& v) {
         auto o = parse_block_order(v);
         if (!o) throw config_error(k + ": unknown block order '" + v + "'");
         d.cfg.order = *o;
       }},
      {"dense_weight", [](Draft& d, const std::string& k, const std::string& v) { d.dense = parse_double(k, v); }},
      {"sparse_weight", [](Draft& d, const std::string& k, const std::string& v) { d.sparse = parse_double(k, v); }},
      {"late_weight", [](Draft& d, const std::string& k, const std::string& v) { d.late = parse_double(k, v); }},
      {"budget",
       [](Draft& d, const std::string& k, const std::string& v) {
         d.cfg.budget = static_cast<std::size_t>(parse_int(k, v, 1, 1LL << 40));
       }},
      {"top_k",
       [](Draft& d, const std::string& k, const std::string& v) {
         d.cfg.top_k = static_cast<std::size_t>(parse_int(k, v, 1, 1LL << 32));
       }},
      {"group_size",
       [](Draft& d, const std::string& k, const std::string& v) {
         d.cfg.grpo.group_size = static_cast<int>(parse_int(k, v, 2, 1 << 20));
       }},
      {"clip_epsilon", [](Draft& d, const std::string& k, const std::string& v) { d.cfg.grpo.clip_epsilon = parse_double(k, v); }},
      {"kl_beta", [](Draft& d, const std::string& k, const std::string& v) { d.cfg.grpo.kl_beta = parse_double(k, v); }},
      {"std_floor", [](Draft& d, const std::string& k, const std::string& v) { d.cfg.grpo.std_floor = parse_double(k, v); }},
      {"backends",
       [](Draft& d, const std::string& k, const std::string& v) {
         if (v == "mock") {
           d.cfg.backends = BackendKind::Mock;
         } else if (v == "http") {
           d.cfg.backends = BackendKind::Http;
         } else {
           throw config_error(k + ": expected 'mock' or 'http', got '" + v + "'");
         }
       }},
      {"embedder_url", [](Draft& d, const std::string&, const std::string& v) { d.cfg.embedder_url = optional_text(v); }},
      {"judge_url", [](Draft& d, const std::string&, const std::string& v) { d.cfg.judge_url = optional_text(v); }},
      {"judge_model", [](Draft& d, const std::string&, const std::string& v) { d.cfg.judge_model = optional_text(v); }},
      {"tokenizer_url", [](Draft& d, const std::string&, const std::string& v) { d.cfg.tokenizer_url = optional_text(v); }},
      {"judge_coverage_template",
       [](Draft& d, const std::string&, const std::string& v) { d.cfg.judge_coverage_template = optional_text(v); }},
      {"judge_contradiction_template",
       [](Draft& d, const std::string&, const std::string& v) { d.cfg.judge_contradiction_template = optional_text(v); }},
      {"listen_host", [](Draft& d, const std::string&, const std::string& v) { d.cfg.listen_host = v; }},
      {"listen_port",
       [](Draft& d, const std::string& k, const std::string& v) {
         d.cfg.listen_port = static_cast<int>(parse_int(k, v, 0, 65535));
       }},
      {"max_inflight",
       [](Draft& d, const std::string& k, const std::string& v) {
         d.cfg.max_inflight = static_cast<std::size_t>(parse_int(k, v, 1, 4096));
       }},
      {"upstream_timeout_s",
       [](Draft& d, const std::string& k, const std::string& v) { d.cfg.upstream_timeout_s = parse_double(k, v); }},
  };
  return table;
}

const Setter* find_setter(const std::string& key) {
  for (const auto& [name, fn] : setters()) {
    if (name == key) return &fn;
  }
  return nullptr;
}

Settings settings_from_table(const toml::table& table, const std::string& source) {
  Settings out;
  for (const auto& [k, node] : table) {
    const std::string key(k.str());
    if (auto s = node.value_exact<std::string>()) {
      out[key] = *s;
    } else if (auto i = node.value_exact<std::int64_t>()) {
      out[key] = std::to_string(*i);
    } else if (auto f = node.value_exact<double>()) {
      out[key] = shortest(*f);
    } else if (auto b = node.value_exact<bool>()) {
      out[key] = *b ? "true" : "false";
    } else {
      throw config_error(source + ": key '" + key + "' must be a string or number");
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, fn] : setters()) keys.push_back(name);
  return keys;
}

void ServiceConfig::validate() const {
  try {
    grpo.validate();
  } catch (const Error& e) {
    throw config_error(e.what());
  }
  if (max_inflight == 0) throw config_error("max_inflight must be at least 1");
  if (!(upstream_timeout_s > 0.0)) throw config_error("upstream_timeout_s must be positive");
  if (backends == BackendKind::Http) {
    if (needs_embedder(mode) && !embedder_url) {
      throw config_error("mode '" + std::string(to_string(mode)) + "' with http backends needs embedder_url");
    }
    if (needs_judge(mode) && !judge_url) {
      throw config_error("mode '" + std::string(to_string(mode)) + "' with http backends needs judge_url");
    }
    for (const auto* url : {&embedder_url, &judge_url, &tokenizer_url}) {
      if (*url) parse_endpoint(**url);
    }
  }
}

Settings settings_from_toml_string(std::string_view text, const std::string& source) {
  try {
    return settings_from_table(toml::parse(text, source), source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw config_error(msg.str());
  }
}

Settings settings_from_toml_file(const std::string& path) {
  try {
    return settings_from_table(toml::parse_file(path), path);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw config_error(msg.str());
  }
}

Settings settings_from_env(const std::vector<std::string>& environment) {
  Settings out;
  for (const auto& entry : environment) {
    if (entry.compare(0, kEnvPrefix.size(), kEnvPrefix) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(kEnvPrefix.size(), eq - kEnvPrefix.size());
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    // only configuration keys; other NITIREWARD_ variables are left alone
    if (find_setter(key)) out[key] = entry.substr(eq + 1);
  }
  return out;
}

Settings settings_from_process_env() {
  std::vector<std::string> entries;
  for (char** e = environ; e && *e; ++e) entries.emplace_back(*e);
  return settings_from_env(entries);
}

Settings settings_from_flags(const std::vector<std::string>& assignments) {
  Settings out;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw config_error("--set expects key=value, got '" + a + "'");
    }
    out[a.substr(0, eq)] = a.substr(eq + 1);
  }
  return out;
}

ServiceConfig build_config(const std::vector<Settings>& layers_low_to_high) {
  Settings merged;
  for (const auto& layer : layers_low_to_high) {
    for (const auto& [k, v] : layer) merged[k] = v;
  }
  Draft d;
  for (const auto& [k, v] : merged) {
    const Setter* set = find_setter(k);
    if (!set) throw config_error("unknown configuration key '" + k + "'");
    (*set)(d, k, v);
  }
  try {
    d.cfg.weights = HeadWeights(d.dense, d.sparse, d.late);
  } catch (const Error& e) {
    throw config_error(std::string("head weights: ") + e.what());
  }
  return d.cfg;
}

ServiceConfig load_config(const std::optional<std::string>& file,
                          const std::vector<std::string>& flag_assignments) {
  std::vector<Settings> layers;
  if (file) layers.push_back(settings_from_toml_file(*file));
  layers.push_back(settings_from_process_env());
  layers.push_back(settings_from_flags(flag_assignments));
  auto cfg = build_config(layers);
  cfg.validate();
  return cfg;
}

ScoringContext Backends::scoring_context(const ServiceConfig& config) const {
  ScoringContext ctx;
  ctx.mode = config.mode;
  ctx.order = config.order;
  ctx.weights = config.weights;
  ctx.grpo = config.grpo;
  ctx.embedder = embedder.get();
  ctx.judge = judge.get();
  ctx.max_parallel = config.max_inflight;
  return ctx;
}

Backends make_backends(const ServiceConfig& config) {
  Backends b;
  if (config.backends == BackendKind::Mock) {
    b.embedder = std::make_unique<HashNgramEmbedder>();
    b.judge = std::make_unique<MockJudge>();
    b.counter = std::make_unique<HeuristicTokenCounter>();
    return b;
  }
  const HttpOptions opts{config.max_inflight, config.upstream_timeout_s};
  if (config.embedder_url) {
    b.embedder = std::make_unique<HttpEmbedder>(*config.embedder_url, opts);
    b.embedder_url = *config.embedder_url;
  }
  if (config.judge_url) {
    auto templates = JudgeTemplates::defaults();
    if (config.judge_coverage_template || config.judge_contradiction_template) {
      if (!config.judge_coverage_template || !config.judge_contradiction_template) {
        throw config_error("judge templates must be given as a pair");
      }
      templates = JudgeTemplates::load(*config.judge_coverage_template,
                                       *config.judge_contradiction_template);
    }
    b.judge = std::make_unique<HttpJudge>(*config.judge_url, std::move(templates),
                                          config.judge_model, opts);
    b.judge_url = *config.judge_url;
  }
  if (config.tokenizer_url) {
    b.counter = std::make_unique<HttpTokenCounter>(*config.tokenizer_url, opts);
    b.tokenizer_url = *config.tokenizer_url;
  } else {
    b.counter = std::make_unique<HeuristicTokenCounter>();
  }
  return b;
}

}  // namespace nitireward

// Copyright 2026 The DaoEval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "daoeval/config.hpp"

#include <algorithm>
#include <set>

#include "daoeval/error.hpp"

namespace daoeval {
namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const std::exception&) {
    config_error("invalid value for '" + std::string(key) + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kIngest: return "ingest";
    case Command::kFeatures: return "features";
    case Command::kSimulate: return "simulate";
    case Command::kEvaluate: return "evaluate";
    case Command::kReport: return "report";
    case Command::kSynth: return "synth";
  }
  return "ingest";
}

Command parse_command(std::string_view text) {
  for (auto c : {Command::kIngest, Command::kFeatures, Command::kSimulate, Command::kEvaluate,
                 Command::kReport, Command::kSynth}) {
    if (to_string(c) == text) return c;
  }
  config_error("unknown command '" + std::string(text) + "'");
}

std::string_view to_string(CutoffMode mode) {
  switch (mode) {
    case CutoffMode::kExAnte: return "ex-ante";
    case CutoffMode::kExPost: return "ex-post";
    case CutoffMode::kBoth: return "both";
  }
  return "ex-post";
}

RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "config",
             {"dataset", "output", "workers", "seed", "sources", "ingest", "policy", "llm",
              "cutoff", "thresholds", "similar_k", "index_id", "protocol_map", "price_measure",
              "exclude_ties", "report", "scenario"});
  RunConfig c;
  c.base_dir = base_dir;

  std::string dataset = "dataset";
  std::string output = "out";
  read(doc, "dataset", dataset, "config");
  read(doc, "output", output, "config");
  c.dataset_root = resolve(base_dir, dataset);
  c.output_dir = resolve(base_dir, output);
  read(doc, "workers", c.workers, "config");
  read(doc, "seed", c.seed, "config");
  if (c.workers == 0) config_error("workers must be positive");

  if (auto it = doc.find("sources"); it != doc.end()) {
    const Json& s = *it;
    check_keys(s, "sources",
               {"snapshot_url", "defillama_url", "coinmarketcap_url", "coinmarketcap_key_env",
                "coinmarketcap_index_path", "forum_url", "forum_file", "requests_per_second",
                "max_attempts", "initial_backoff_ms", "timeout_seconds"});
    auto& e = c.sources;
    read(s, "snapshot_url", e.snapshot_url, "sources");
    read(s, "defillama_url", e.defillama_url, "sources");
    read(s, "coinmarketcap_url", e.coinmarketcap_url, "sources");
    read(s, "coinmarketcap_key_env", e.coinmarketcap_key_env, "sources");
    read(s, "coinmarketcap_index_path", e.coinmarketcap_index_path, "sources");
    if (s.contains("forum_url") && !s["forum_url"].is_null()) {
      std::string u;
      read(s, "forum_url", u, "sources");
      e.forum_url = u;
    }
    if (s.contains("forum_file") && !s["forum_file"].is_null()) {
      std::string f;
      read(s, "forum_file", f, "sources");
      e.forum_file = resolve(base_dir, f);
    }
    read(s, "requests_per_second", e.requests_per_second, "sources");
    read(s, "max_attempts", e.max_attempts, "sources");
    read(s, "initial_backoff_ms", e.initial_backoff_ms, "sources");
    read(s, "timeout_seconds", e.timeout_seconds, "sources");
    if (e.max_attempts < 1) config_error("sources.max_attempts must be at least 1");
    if (e.initial_backoff_ms < 0) config_error("sources.initial_backoff_ms must be >= 0");
    if (e.requests_per_second < 0) config_error("sources.requests_per_second must be >= 0");
    if (e.timeout_seconds <= 0) config_error("sources.timeout_seconds must be positive");
  }

  if (auto it = doc.find("ingest"); it != doc.end()) {
    const Json& s = *it;
    check_keys(s, "ingest", {"spaces", "proposal_ids", "labels", "symbols", "market"});
    read(s, "spaces", c.ingest.spaces, "ingest");
    read(s, "proposal_ids", c.ingest.proposal_ids, "ingest");
    read(s, "symbols", c.ingest.symbols, "ingest");
    read(s, "market", c.ingest.market, "ingest");
    if (s.contains("labels") && !s["labels"].is_null()) {
      std::string f;
      read(s, "labels", f, "ingest");
      c.ingest.labels_file = resolve(base_dir, f);
    }
  }

  if (auto it = doc.find("policy"); it != doc.end()) {
    if (it->is_string()) {
      c.policy = it->get<std::string>();
    } else {
      check_keys(*it, "policy", {"name", "id"});
      read(*it, "name", c.policy, "policy");
      read(*it, "id", c.policy_id, "policy");
    }
  }
  if (c.policy != "llm" && !parse_baseline_policy(c.policy)) {
    config_error("unknown policy '" + c.policy + "'");
  }
  if (c.policy_id.empty()) c.policy_id = c.policy;
  if (c.policy_id.find_first_of("/\\") != std::string::npos || c.policy_id.starts_with(".")) {
    config_error("policy id '" + c.policy_id + "' is not a valid file name component");
  }

  if (auto it = doc.find("llm"); it != doc.end()) {
    check_keys(*it, "llm", {"url", "model", "api_key_env", "temperature"});
    read(*it, "url", c.llm.url, "llm");
    read(*it, "model", c.llm.model, "llm");
    read(*it, "api_key_env", c.llm.api_key_env, "llm");
    read(*it, "temperature", c.llm.temperature, "llm");
  }

  if (auto it = doc.find("cutoff"); it != doc.end()) {
    std::string mode;
    read(doc, "cutoff", mode, "config");
    if (mode == "ex-ante") {
      c.cutoff = CutoffMode::kExAnte;
    } else if (mode == "ex-post") {
      c.cutoff = CutoffMode::kExPost;
    } else if (mode == "both") {
      c.cutoff = CutoffMode::kBoth;
    } else {
      config_error("cutoff must be ex-ante, ex-post or both");
    }
  }

  if (auto it = doc.find("thresholds"); it != doc.end()) {
    check_keys(*it, "thresholds", {"contested", "min_participation", "window_days"});
    read(*it, "contested", c.contested_threshold, "thresholds");
    read(*it, "min_participation", c.min_participation, "thresholds");
    read(*it, "window_days", c.window_days, "thresholds");
  }
  if (!(c.contested_threshold > 0.0 && c.contested_threshold <= 1.0)) {
    config_error("thresholds.contested must lie in (0,1]");
  }
  if (c.min_participation == 0) config_error("thresholds.min_participation must be positive");
  if (c.window_days <= 0) config_error("thresholds.window_days must be positive");

  read(doc, "similar_k", c.similar_k, "config");
  read(doc, "index_id", c.index_id, "config");
  read(doc, "protocol_map", c.protocol_map, "config");
  read(doc, "exclude_ties", c.exclude_ties, "config");
  if (doc.contains("price_measure")) {
    std::string m;
    read(doc, "price_measure", m, "config");
    try {
      c.price_measure = parse_price_measure(m);
    } catch (const Error& e) {
      config_error(e.what());
    }
  }

  c.report_json = c.output_dir / "report.json";
  c.report_markdown = c.output_dir / "report.md";
  c.report_csv_dir = c.output_dir / "tables";
  if (auto it = doc.find("report"); it != doc.end()) {
    check_keys(*it, "report", {"json", "markdown", "csv_dir"});
    std::string p;
    if (it->contains("json")) {
      read(*it, "json", p, "report");
      c.report_json = resolve(base_dir, p);
    }
    if (it->contains("markdown")) {
      read(*it, "markdown", p, "report");
      c.report_markdown = resolve(base_dir, p);
    }
    if (it->contains("csv_dir")) {
      read(*it, "csv_dir", p, "report");
      c.report_csv_dir = resolve(base_dir, p);
    }
  }

  if (auto it = doc.find("scenario"); it != doc.end() && !it->is_null()) {
    if (it->is_string()) {
      c.scenario_file = resolve(base_dir, it->get<std::string>());
    } else if (it->is_object()) {
      c.scenario_inline = *it;
    } else {
      config_error("scenario must be a path or an object");
    }
  }
  return c;
}

void validate_for_command(const RunConfig& c, Command command) {
  namespace fs = std::filesystem;
  switch (command) {
    case Command::kIngest:
      if (c.ingest.spaces.empty() && c.ingest.proposal_ids.empty()) {
        config_error("ingest needs ingest.spaces or ingest.proposal_ids");
      }
      if (c.ingest.labels_file && !fs::exists(*c.ingest.labels_file)) {
        config_error("labels file not found: " + c.ingest.labels_file->string());
      }
      if (c.sources.forum_file && !fs::exists(*c.sources.forum_file)) {
        config_error("forum file not found: " + c.sources.forum_file->string());
      }
      break;
    case Command::kFeatures:
    case Command::kSimulate:
    case Command::kEvaluate:
      if (!fs::exists(c.dataset_root / "manifest.json")) {
        config_error("no dataset at " + c.dataset_root.string() + " (manifest.json missing)");
      }
      if (command == Command::kSimulate && c.policy == "llm" && c.llm.url.empty()) {
        config_error("policy llm needs llm.url");
      }
      break;
    case Command::kReport:
      break;
    case Command::kSynth:
      if (!c.scenario_file && !c.scenario_inline) config_error("synth needs a scenario");
      if (c.scenario_file && !fs::exists(*c.scenario_file)) {
        config_error("scenario file not found: " + c.scenario_file->string());
      }
      break;
  }
}

ContextOptions context_options(const RunConfig& c) {
  ContextOptions o;
  o.similar_k = c.similar_k;
  o.window_days = c.window_days;
  o.protocol_map = c.protocol_map;
  o.index_id = c.index_id;
  return o;
}

}  // namespace daoeval

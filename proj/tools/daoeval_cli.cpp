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

// daoeval command-line front end. Links only against the C API.
//
//   daoeval <ingest|features|simulate|evaluate|report|synth> [--config FILE] [flags]
//
// Flags override the matching config keys. Exit codes: 0 success, 2 config
// error, 3 upstream failure, 4 incomplete evaluation coverage, 1 otherwise.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "daoeval/daoeval.h"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Overrides {
  std::optional<std::string> dataset, output, policy, policy_id, cutoff, price_measure;
  std::optional<std::string> report_json, report_md, csv_dir, scenario, labels, forum_file;
  std::optional<std::string> snapshot_url, defillama_url, cmc_url, forum_url, llm_url, llm_model;
  std::optional<std::string> index_id;
  std::optional<std::size_t> workers, min_participation, similar_k;
  std::optional<unsigned long long> seed;
  std::optional<double> contested, rps;
  std::optional<int> window_days, max_attempts;
  std::vector<std::string> spaces, proposal_ids;
  bool exclude_ties = false;
  bool quiet = false;
};

std::string absolute(const std::string& p) { return fs::absolute(fs::path(p)).string(); }

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int fail(int code, const std::string& message) {
  std::fprintf(stderr, "daoeval: %s\n", message.c_str());
  return code;
}

Json merge(Json config, const Overrides& o) {
  auto set = [&](std::initializer_list<const char*> path, Json value) {
    Json* node = &config;
    auto it = path.begin();
    for (; std::next(it) != path.end(); ++it) {
      if (!node->contains(*it) || !(*node)[*it].is_object()) (*node)[*it] = Json::object();
      node = &(*node)[*it];
    }
    (*node)[*it] = std::move(value);
  };
  if (o.dataset) set({"dataset"}, absolute(*o.dataset));
  if (o.output) set({"output"}, absolute(*o.output));
  if (o.workers) set({"workers"}, *o.workers);
  if (o.seed) set({"seed"}, *o.seed);
  if (o.policy || o.policy_id) {
    Json policy = Json::object();
    if (config.contains("policy")) {
      policy = config["policy"].is_string() ? Json{{"name", config["policy"]}} : config["policy"];
    }
    if (o.policy) {
      policy["name"] = *o.policy;
      if (!o.policy_id) policy.erase("id");
    }
    if (o.policy_id) policy["id"] = *o.policy_id;
    config["policy"] = policy;
  }
  if (o.cutoff) set({"cutoff"}, *o.cutoff);
  if (o.contested) set({"thresholds", "contested"}, *o.contested);
  if (o.min_participation) set({"thresholds", "min_participation"}, *o.min_participation);
  if (o.window_days) set({"thresholds", "window_days"}, *o.window_days);
  if (o.similar_k) set({"similar_k"}, *o.similar_k);
  if (o.index_id) set({"index_id"}, *o.index_id);
  if (o.price_measure) set({"price_measure"}, *o.price_measure);
  if (o.exclude_ties) set({"exclude_ties"}, true);
  if (o.report_json) set({"report", "json"}, absolute(*o.report_json));
  if (o.report_md) set({"report", "markdown"}, absolute(*o.report_md));
  if (o.csv_dir) set({"report", "csv_dir"}, absolute(*o.csv_dir));
  if (o.scenario) set({"scenario"}, absolute(*o.scenario));
  if (!o.spaces.empty()) set({"ingest", "spaces"}, o.spaces);
  if (!o.proposal_ids.empty()) set({"ingest", "proposal_ids"}, o.proposal_ids);
  if (o.labels) set({"ingest", "labels"}, absolute(*o.labels));
  if (o.snapshot_url) set({"sources", "snapshot_url"}, *o.snapshot_url);
  if (o.defillama_url) set({"sources", "defillama_url"}, *o.defillama_url);
  if (o.cmc_url) set({"sources", "coinmarketcap_url"}, *o.cmc_url);
  if (o.forum_url) set({"sources", "forum_url"}, *o.forum_url);
  if (o.forum_file) set({"sources", "forum_file"}, absolute(*o.forum_file));
  if (o.rps) set({"sources", "requests_per_second"}, *o.rps);
  if (o.max_attempts) set({"sources", "max_attempts"}, *o.max_attempts);
  if (o.llm_url) set({"llm", "url"}, *o.llm_url);
  if (o.llm_model) set({"llm", "model"}, *o.llm_model);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Governance decision alignment: ingest, features, simulate, evaluate, report"};
  app.set_version_flag("--version", std::string(daoeval_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  Overrides o;
  app.add_option("-c,--config", config_path, "Run configuration (JSON)");
  app.add_option("--dataset", o.dataset, "Dataset store directory");
  app.add_option("--output", o.output, "Output directory for artifacts");
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for randomized policies");
  app.add_option("--policy", o.policy,
                 "token_majority, headcount_majority, sentiment_sign, seeded_random or llm");
  app.add_option("--policy-id", o.policy_id, "Label for decision artifacts");
  app.add_option("--cutoff", o.cutoff, "ex-ante, ex-post or both")
      ->check(CLI::IsMember({"ex-ante", "ex-post", "both"}));
  app.add_option("--contested-threshold", o.contested, "S_p threshold for contested proposals");
  app.add_option("--min-participation", o.min_participation, "Minimum |P_i| for voter medians");
  app.add_option("--window-days", o.window_days, "Market event window half-width in days");
  app.add_option("--similar-k", o.similar_k, "Similar past proposals shown to the policy");
  app.add_option("--index-id", o.index_id, "Market index protocol id");
  app.add_option("--price-measure", o.price_measure, "price_pct_change or adj_return");
  app.add_flag("--exclude-ties", o.exclude_ties, "Drop tied proposals from the report");
  app.add_option("--report-json", o.report_json, "Report JSON path");
  app.add_option("--report-md", o.report_md, "Report Markdown path");
  app.add_option("--csv-dir", o.csv_dir, "Directory for CSV tables");
  app.add_option("--scenario", o.scenario, "Synthetic scenario file (synth)");
  app.add_option("--spaces", o.spaces, "Snapshot spaces to ingest")->delimiter(',');
  app.add_option("--proposal-ids", o.proposal_ids, "Extra proposal ids to ingest")->delimiter(',');
  app.add_option("--labels", o.labels, "Proposal label file (JSONL)");
  app.add_option("--snapshot-url", o.snapshot_url, "Snapshot GraphQL endpoint");
  app.add_option("--defillama-url", o.defillama_url, "DeFiLlama base URL");
  app.add_option("--cmc-url", o.cmc_url, "CoinMarketCap base URL");
  app.add_option("--forum-url", o.forum_url, "Forum signal base URL");
  app.add_option("--forum-file", o.forum_file, "Forum signals file (JSONL)");
  app.add_option("--rps", o.rps, "Requests per second per source");
  app.add_option("--max-attempts", o.max_attempts, "HTTP attempts per request");
  app.add_option("--llm-url", o.llm_url, "Chat-completions endpoint");
  app.add_option("--llm-model", o.llm_model, "Model name sent to the endpoint");
  app.add_flag("-q,--quiet", o.quiet, "Suppress structured log lines");

  for (const char* name : {"ingest", "features", "simulate", "evaluate", "report", "synth"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Json config = Json::object();
  std::string base_dir = fs::current_path().string();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) return fail(2, "cannot read config file " + config_path);
    try {
      config = Json::parse(in);
    } catch (const Json::exception& e) {
      return fail(2, "config file " + config_path + " is not valid JSON: " + e.what());
    }
    base_dir = fs::absolute(fs::path(config_path)).parent_path().string();
  }
  config = merge(std::move(config), o);

  daoeval_context* ctx = nullptr;
  daoeval_status st = daoeval_create(config.dump().c_str(), base_dir.c_str(), &ctx);
  if (st != DAOEVAL_OK) return fail(daoeval_exit_code(st), daoeval_last_error(nullptr));
  if (!o.quiet) daoeval_set_log_callback(ctx, log_line, nullptr);

  st = daoeval_run(ctx, command.c_str());
  int code = 0;
  if (st != DAOEVAL_OK) code = fail(daoeval_exit_code(st), daoeval_last_error(ctx));

  char* counters = nullptr;
  if (!o.quiet && daoeval_counters_json(ctx, &counters) == DAOEVAL_OK) {
    std::fprintf(stderr, "{\"level\":\"info\",\"event\":\"counters\",\"detail\":%s}\n", counters);
    daoeval_string_free(counters);
  }
  daoeval_destroy(ctx);
  return code;
}

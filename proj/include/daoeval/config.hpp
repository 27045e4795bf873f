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

// Run configuration shared by every pipeline command.
//
// One JSON document; relative paths resolve against `base_dir` (the
// directory of the config file, or the working directory for inline
// configs). API keys are never read from the document, only from the
// environment variables it names.

#ifndef DAOEVAL_CONFIG_HPP_
#define DAOEVAL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/eval.hpp"
#include "daoeval/policy.hpp"

namespace daoeval {

enum class Command { kIngest, kFeatures, kSimulate, kEvaluate, kReport, kSynth };
std::string_view to_string(Command command);
/// Throws kConfigError for unknown commands.
Command parse_command(std::string_view text);

struct SourceEndpoints {
  std::string snapshot_url = "https://hub.snapshot.org/graphql";
  std::string defillama_url = "https://api.llama.fi";
  std::string coinmarketcap_url = "https://pro-api.coinmarketcap.com";
  std::string coinmarketcap_key_env = "CMC_PRO_API_KEY";
  std::string coinmarketcap_index_path = "/v3/index/cmc100-historical";
  std::optional<std::string> forum_url;
  std::optional<std::filesystem::path> forum_file;
  double requests_per_second = 5.0;
  int max_attempts = 5;
  int initial_backoff_ms = 250;
  int timeout_seconds = 30;
};

struct IngestOptions {
  std::vector<std::string> spaces;
  std::vector<std::string> proposal_ids;
  std::optional<std::filesystem::path> labels_file;
  std::map<std::string, std::string> symbols;  // protocol -> ticker
  bool market = true;
};

struct LlmOptions {
  std::string url;
  std::string model = "gpt-4o";
  std::string api_key_env = "DAOEVAL_LLM_API_KEY";
  double temperature = 0.0;
};

enum class CutoffMode { kExAnte, kExPost, kBoth };
std::string_view to_string(CutoffMode mode);

struct RunConfig {
  std::filesystem::path base_dir;
  std::filesystem::path dataset_root;
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  SourceEndpoints sources;
  IngestOptions ingest;

  /// Baseline name or "llm".
  std::string policy = "token_majority";
  /// Label used in artifacts; defaults to the policy name.
  std::string policy_id;
  LlmOptions llm;
  CutoffMode cutoff = CutoffMode::kExPost;

  double contested_threshold = 0.60;
  std::size_t min_participation = 5;
  int window_days = 3;
  std::size_t similar_k = 5;
  std::string index_id = "cmc100";
  std::map<std::string, std::string> protocol_map;
  PriceMeasure price_measure = PriceMeasure::kPctChange;
  bool exclude_ties = false;

  std::filesystem::path report_json;
  std::filesystem::path report_markdown;
  std::filesystem::path report_csv_dir;

  /// Scenario for `synth`: a path or an inline JSON object.
  std::optional<std::filesystem::path> scenario_file;
  std::optional<Json> scenario_inline;
};

/// Parses and range-checks a config document. Throws kConfigError.
RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir);

/// Command-specific checks, e.g. that the dataset exists before `features`.
/// Throws kConfigError.
void validate_for_command(const RunConfig& config, Command command);

ContextOptions context_options(const RunConfig& config);

}  // namespace daoeval

#endif  // DAOEVAL_CONFIG_HPP_

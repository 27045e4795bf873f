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

// Clients for the upstream services the dataset is built from. Each client
// talks to a configurable base URL so the bundled mock server can stand in
// for the real service.

#ifndef DAOEVAL_SOURCES_HPP_
#define DAOEVAL_SOURCES_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/dataset.hpp"
#include "daoeval/http.hpp"
#include "daoeval/model.hpp"

namespace daoeval {

class Diagnostics;

struct DayRange {
  Day first = 0;
  Day last = 0;  // inclusive
};

/// Snapshot hub GraphQL client. `endpoint` is the full GraphQL URL, e.g.
/// https://hub.snapshot.org/graphql.
class SnapshotClient {
 public:
  static constexpr int kProposalPageSize = 1000;
  static constexpr int kVotePageSize = 1000;

  SnapshotClient(HttpClient& http, std::string endpoint, Diagnostics* diag = nullptr);

  /// All closed proposals of the given spaces ordered by
  /// (space_id, created_at, id). Throws kInvalidArgument on an empty list.
  std::vector<Proposal> fetch_proposals(std::span<const std::string> space_ids);

  /// Throws kNotFound when the hub does not know the id.
  Proposal fetch_proposal(const std::string& proposal_id);

  /// Complete ballot list with duplicate ballots collapsed to the latest one
  /// and out-of-window ballots dropped. Throws kNotFound for unknown ids and
  /// kSourceProtocolError when paging stops making progress.
  std::vector<VoteRecord> fetch_votes(const std::string& proposal_id);
  std::vector<VoteRecord> fetch_votes(const Proposal& proposal);

 private:
  Json query(const std::string& text, Json variables);

  HttpClient& http_;
  std::string endpoint_;
  Diagnostics* diag_;
};

/// DeFiLlama REST: TVL from /protocol/<slug>, treasury from /treasury/<slug>.
class DefiLlamaClient {
 public:
  DefiLlamaClient(HttpClient& http, std::string base_url);
  MarketSeries fetch(const std::string& protocol, MarketMetric metric, DayRange range);

 private:
  HttpClient& http_;
  std::string base_;
};

/// CoinMarketCap-compatible REST: daily token quotes and a market index.
class CoinMarketCapClient {
 public:
  CoinMarketCapClient(HttpClient& http, std::string base_url, std::string api_key,
                      std::string index_path = "/v3/index/cmc100-historical");
  MarketSeries fetch_price(const std::string& protocol, const std::string& symbol,
                           DayRange range);
  MarketSeries fetch_index(const std::string& index_id, DayRange range);

 private:
  HttpClient& http_;
  std::string base_;
  std::string api_key_;
  std::string index_path_;
};

/// Dispatches a market request to the right upstream by metric.
class MarketSource {
 public:
  MarketSource(DefiLlamaClient& llama, CoinMarketCapClient& cmc,
               std::map<std::string, std::string> symbols = {});

  /// Throws kNotFound for unknown protocols and kNoData for empty series.
  /// Gaps are preserved; samples outside `range` are dropped.
  MarketSeries fetch_market_series(const std::string& protocol, MarketMetric metric,
                                   DayRange range);

 private:
  DefiLlamaClient& llama_;
  CoinMarketCapClient& cmc_;
  std::map<std::string, std::string> symbols_;
};

/// Collapses (timestamp, value) points to one close per UTC day and keeps
/// the days inside `range`.
std::vector<MarketSample> collapse_daily(std::vector<std::pair<Timestamp, double>> points,
                                         DayRange range);

/// Forum signals from a JSON-lines file in the dataset encoding.
std::vector<ForumSignal> load_forum_file(const std::filesystem::path& path);

/// GET <base>/forum/<proposal_id>; 404 means no thread.
std::optional<ForumSignal> fetch_forum_signal(HttpClient& http, const std::string& base_url,
                                              const std::string& proposal_id);

// Fixed-word-list scorer used to build forum fixtures. Score is
// (positive hits - negative hits) / (positive hits + negative hits), 0 when
// nothing matches.
double lexicon_score(std::string_view text);
Polarity lexicon_polarity(std::string_view text);

struct RawComment {
  Timestamp timestamp = 0;
  std::string text;
};
ForumSignal score_forum_thread(const std::string& proposal_id, const std::string& url,
                               std::span<const RawComment> comments);

/// Per-proposal labels (category, calls_for_change) from a JSON-lines file of
/// {"id": ..., "category": ..., "calls_for_change": ...}.
void apply_label_file(const std::filesystem::path& path, std::vector<Proposal>& proposals);

}  // namespace daoeval

#endif  // DAOEVAL_SOURCES_HPP_

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

#include "daoeval/sources.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"
#include "daoeval/store.hpp"

namespace daoeval {
namespace {

constexpr const char* kProposalFields =
    "id title body choices created start end state space { id }";

const std::string kProposalsQuery =
    std::string(
        "query Proposals($spaces: [String], $first: Int, $skip: Int) {\n"
        "  proposals(first: $first, skip: $skip, where: {space_in: $spaces, "
        "state: \"closed\"}, orderBy: \"created\", orderDirection: asc) {\n    ") +
    kProposalFields + "\n  }\n}";

const std::string kProposalQuery =
    std::string("query Proposal($id: String!) {\n  proposal(id: $id) {\n    ") +
    kProposalFields + "\n  }\n}";

const std::string kVotesQuery =
    "query Votes($proposal: String!, $first: Int, $created_gte: Int) {\n"
    "  votes(first: $first, where: {proposal: $proposal, created_gte: $created_gte}, "
    "orderBy: \"created\", orderDirection: asc) {\n"
    "    id voter vp choice created\n  }\n}";

Proposal proposal_from_snapshot(const Json& j) {
  Proposal p;
  p.id = require_string(j, "id");
  const Json& space = require_field(j, "space");
  p.space_id = space.is_object() ? require_string(space, "id") : space.get<std::string>();
  p.title = require_string(j, "title");
  if (auto it = j.find("body"); it != j.end() && it->is_string() && !it->get<std::string>().empty()) {
    p.body = it->get<std::string>();
  }
  for (const auto& c : require_field(j, "choices")) {
    if (!c.is_string()) throw Error(ErrorCode::kInvalidRecord, "choice label not a string");
    p.choices.push_back(c.get<std::string>());
  }
  if (auto it = j.find("created"); it != j.end() && !it->is_null()) {
    p.created_at = timestamp_from_json(*it);
  }
  p.start = timestamp_from_json(require_field(j, "start"));
  p.end = timestamp_from_json(require_field(j, "end"));
  validate_proposal(p);
  return p;
}

[[noreturn]] void protocol_error(const std::string& what) {
  throw Error(ErrorCode::kSourceProtocolError, what);
}

Json parse_body(const HttpResponse& res, const std::string& source) {
  try {
    return Json::parse(res.body);
  } catch (const std::exception& e) {
    protocol_error(source + ": response is not JSON: " + e.what());
  }
}

}  // namespace

SnapshotClient::SnapshotClient(HttpClient& http, std::string endpoint, Diagnostics* diag)
    : http_(http), endpoint_(std::move(endpoint)), diag_(diag) {}

Json SnapshotClient::query(const std::string& text, Json variables) {
  Json body;
  body["query"] = text;
  body["variables"] = std::move(variables);
  HttpResponse res = http_.post(endpoint_, body.dump(), {{"Content-Type", "application/json"}});
  if (res.status != 200) {
    protocol_error("snapshot: HTTP " + std::to_string(res.status) + " from " + endpoint_);
  }
  Json j = parse_body(res, "snapshot");
  if (j.contains("errors") && !j["errors"].empty()) {
    protocol_error("snapshot: GraphQL error: " + j["errors"].dump());
  }
  if (!j.contains("data") || !j["data"].is_object()) protocol_error("snapshot: missing data");
  return j["data"];
}

std::vector<Proposal> SnapshotClient::fetch_proposals(std::span<const std::string> space_ids) {
  if (space_ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "fetch_proposals needs at least one space id");
  }
  std::vector<Proposal> out;
  std::set<std::string> seen;
  for (const auto& space : space_ids) {
    int skip = 0;
    for (;;) {
      Json data = query(kProposalsQuery, Json{{"spaces", Json::array({space})},
                                              {"first", kProposalPageSize},
                                              {"skip", skip}});
      const Json& page = data["proposals"];
      if (!page.is_array()) protocol_error("snapshot: proposals is not a list");
      std::size_t fresh = 0;
      for (const auto& rec : page) {
        try {
          if (rec.contains("state") && rec["state"].is_string() &&
              rec["state"].get<std::string>() != "closed") {
            continue;
          }
          Proposal p = proposal_from_snapshot(rec);
          if (!seen.insert(p.id).second) continue;
          ++fresh;
          out.push_back(std::move(p));
        } catch (const Error& e) {
          if (diag_) diag_->Warn(warn::kRecordSkipped, std::string("proposal: ") + e.what());
          ++fresh;
        }
      }
      if (page.size() < static_cast<std::size_t>(kProposalPageSize)) break;
      if (fresh == 0) protocol_error("snapshot: proposal paging made no progress");
      skip += static_cast<int>(page.size());
    }
  }
  std::sort(out.begin(), out.end(), [](const Proposal& a, const Proposal& b) {
    const Timestamp ca = a.created_at.value_or(a.start);
    const Timestamp cb = b.created_at.value_or(b.start);
    return std::tie(a.space_id, ca, a.id) < std::tie(b.space_id, cb, b.id);
  });
  return out;
}

Proposal SnapshotClient::fetch_proposal(const std::string& proposal_id) {
  Json data = query(kProposalQuery, Json{{"id", proposal_id}});
  if (!data.contains("proposal") || data["proposal"].is_null()) {
    throw Error(ErrorCode::kNotFound, "snapshot: unknown proposal '" + proposal_id + "'");
  }
  try {
    return proposal_from_snapshot(data["proposal"]);
  } catch (const Error& e) {
    protocol_error(std::string("snapshot: malformed proposal: ") + e.what());
  }
}

std::vector<VoteRecord> SnapshotClient::fetch_votes(const std::string& proposal_id) {
  return fetch_votes(fetch_proposal(proposal_id));
}

std::vector<VoteRecord> SnapshotClient::fetch_votes(const Proposal& proposal) {
  std::vector<VoteRecord> votes;
  std::unordered_set<std::string> seen_ids;
  std::int64_t cursor = 0;
  for (;;) {
    Json data = query(kVotesQuery, Json{{"proposal", proposal.id},
                                        {"first", kVotePageSize},
                                        {"created_gte", cursor}});
    const Json& page = data["votes"];
    if (!page.is_array()) protocol_error("snapshot: votes is not a list");
    std::size_t fresh = 0;
    std::int64_t last_created = cursor;
    for (const auto& rec : page) {
      std::string id;
      if (rec.contains("id") && rec["id"].is_string()) id = rec["id"].get<std::string>();
      if (!id.empty() && !seen_ids.insert(id).second) continue;
      ++fresh;
      try {
        VoteRecord v;
        v.proposal_id = proposal.id;
        v.voter = require_string(rec, "voter");
        v.choice = choice_from_json(require_field(rec, "choice"));
        v.vp = require_number(rec, "vp");
        v.timestamp = timestamp_from_json(require_field(rec, "created"));
        last_created = std::max(last_created, v.timestamp);
        if (!in_voting_window(proposal, v.timestamp)) {
          if (diag_) diag_->Warn(warn::kVoteOutOfWindow, proposal.id + "/" + v.voter);
          continue;
        }
        validate_vote(v, proposal);
        votes.push_back(std::move(v));
      } catch (const Error& e) {
        if (diag_) diag_->Warn(warn::kRecordSkipped, std::string("vote: ") + e.what());
      }
    }
    if (page.size() < static_cast<std::size_t>(kVotePageSize)) break;
    if (fresh == 0 || last_created < cursor) {
      protocol_error("snapshot: vote cursor for '" + proposal.id + "' stopped advancing");
    }
    cursor = last_created;
  }
  return deduplicate_ballots(std::move(votes), diag_);
}

std::vector<MarketSample> collapse_daily(std::vector<std::pair<Timestamp, double>> points,
                                         DayRange range) {
  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<MarketSample> out;
  for (const auto& [ts, value] : points) {
    const Day d = day_of(ts);
    if (d < range.first || d > range.last) continue;
    if (!out.empty() && out.back().day == d) {
      out.back().value = value;
    } else {
      out.push_back({d, value});
    }
  }
  return out;
}

DefiLlamaClient::DefiLlamaClient(HttpClient& http, std::string base_url)
    : http_(http), base_(std::move(base_url)) {}

MarketSeries DefiLlamaClient::fetch(const std::string& protocol, MarketMetric metric,
                                    DayRange range) {
  if (metric != MarketMetric::kTvl && metric != MarketMetric::kTreasury) {
    throw Error(ErrorCode::kInvalidArgument, "DeFiLlama serves tvl and treasury only");
  }
  const std::string path = metric == MarketMetric::kTvl ? "/protocol/" : "/treasury/";
  HttpResponse res = http_.get(base_ + path + url_encode(protocol));
  if (res.status == 404 || res.status == 400) {
    throw Error(ErrorCode::kNotFound, "defillama: unknown protocol '" + protocol + "'");
  }
  if (res.status != 200) {
    protocol_error("defillama: HTTP " + std::to_string(res.status));
  }
  Json j = parse_body(res, "defillama");
  std::vector<std::pair<Timestamp, double>> points;
  if (!j.contains("tvl") || !j["tvl"].is_array()) protocol_error("defillama: missing tvl list");
  for (const auto& p : j["tvl"]) {
    try {
      const double v = require_number(p, "totalLiquidityUSD");
      if (v < 0) continue;
      points.emplace_back(timestamp_from_json(require_field(p, "date")), v);
    } catch (const Error&) {
      // Malformed points are skipped; the gap stays visible as a missing day.
    }
  }
  MarketSeries s{protocol, metric, collapse_daily(std::move(points), range)};
  return s;
}

CoinMarketCapClient::CoinMarketCapClient(HttpClient& http, std::string base_url,
                                         std::string api_key, std::string index_path)
    : http_(http),
      base_(std::move(base_url)),
      api_key_(std::move(api_key)),
      index_path_(std::move(index_path)) {}

MarketSeries CoinMarketCapClient::fetch_price(const std::string& protocol,
                                              const std::string& symbol, DayRange range) {
  const std::string url = base_ + "/v2/cryptocurrency/quotes/historical?symbol=" +
                          url_encode(symbol) + "&time_start=" +
                          url_encode(format_iso8601(range.first * kSecondsPerDay)) +
                          "&time_end=" +
                          url_encode(format_iso8601((range.last + 1) * kSecondsPerDay - 1)) +
                          "&interval=daily";
  HttpResponse res = http_.get(url, {{"X-CMC_PRO_API_KEY", api_key_}});
  if (res.status == 404 || res.status == 400) {
    throw Error(ErrorCode::kNotFound, "coinmarketcap: unknown symbol '" + symbol + "'");
  }
  if (res.status != 200) protocol_error("coinmarketcap: HTTP " + std::to_string(res.status));
  Json j = parse_body(res, "coinmarketcap");
  const Json* quotes = nullptr;
  if (j.contains("data") && j["data"].is_object()) {
    const Json& data = j["data"];
    if (data.contains("quotes")) {
      quotes = &data["quotes"];
    } else if (data.contains(symbol) && data[symbol].is_array() && !data[symbol].empty()) {
      quotes = &data[symbol][0]["quotes"];
    }
  }
  if (!quotes || !quotes->is_array()) protocol_error("coinmarketcap: missing quotes");
  std::vector<std::pair<Timestamp, double>> points;
  for (const auto& q : *quotes) {
    try {
      const double price = require_number(require_field(require_field(q, "quote"), "USD"), "price");
      points.emplace_back(timestamp_from_json(require_field(q, "timestamp")), price);
    } catch (const Error&) {
    }
  }
  return MarketSeries{protocol, MarketMetric::kPrice, collapse_daily(std::move(points), range)};
}

MarketSeries CoinMarketCapClient::fetch_index(const std::string& index_id, DayRange range) {
  const std::string url = base_ + index_path_ + "?time_start=" +
                          url_encode(format_iso8601(range.first * kSecondsPerDay)) +
                          "&time_end=" +
                          url_encode(format_iso8601((range.last + 1) * kSecondsPerDay - 1)) +
                          "&interval=daily";
  HttpResponse res = http_.get(url, {{"X-CMC_PRO_API_KEY", api_key_}});
  if (res.status == 404 || res.status == 400) {
    throw Error(ErrorCode::kNotFound, "coinmarketcap: index unavailable");
  }
  if (res.status != 200) protocol_error("coinmarketcap: HTTP " + std::to_string(res.status));
  Json j = parse_body(res, "coinmarketcap");
  if (!j.contains("data") || !j["data"].is_array()) protocol_error("coinmarketcap: missing index data");
  std::vector<std::pair<Timestamp, double>> points;
  for (const auto& q : j["data"]) {
    try {
      const Json& ts = q.contains("update_time") ? q["update_time"] : require_field(q, "timestamp");
      points.emplace_back(timestamp_from_json(ts), require_number(q, "value"));
    } catch (const Error&) {
    }
  }
  return MarketSeries{index_id, MarketMetric::kIndex, collapse_daily(std::move(points), range)};
}

MarketSource::MarketSource(DefiLlamaClient& llama, CoinMarketCapClient& cmc,
                           std::map<std::string, std::string> symbols)
    : llama_(llama), cmc_(cmc), symbols_(std::move(symbols)) {}

MarketSeries MarketSource::fetch_market_series(const std::string& protocol,
                                               MarketMetric metric, DayRange range) {
  if (range.last < range.first) {
    throw Error(ErrorCode::kInvalidArgument, "day range is empty");
  }
  MarketSeries s;
  switch (metric) {
    case MarketMetric::kTvl:
    case MarketMetric::kTreasury:
      s = llama_.fetch(protocol, metric, range);
      break;
    case MarketMetric::kPrice: {
      std::string symbol;
      if (auto it = symbols_.find(protocol); it != symbols_.end()) {
        symbol = it->second;
      } else {
        symbol = protocol;
        std::transform(symbol.begin(), symbol.end(), symbol.begin(),
                       [](unsigned char c) { return std::toupper(c); });
      }
      s = cmc_.fetch_price(protocol, symbol, range);
      break;
    }
    case MarketMetric::kIndex:
      s = cmc_.fetch_index(protocol, range);
      break;
  }
  if (s.samples.empty()) {
    throw Error(ErrorCode::kNoData, "no " + std::string(to_string(metric)) +
                                        " samples for '" + protocol + "' in range");
  }
  validate_market_series(s);
  return s;
}

std::vector<ForumSignal> load_forum_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<ForumSignal> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ForumSignal f = forum_from_json(Json::parse(line));
      validate_forum_signal(f);
      out.push_back(std::move(f));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kLoadError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::optional<ForumSignal> fetch_forum_signal(HttpClient& http, const std::string& base_url,
                                              const std::string& proposal_id) {
  HttpResponse res = http.get(base_url + "/forum/" + url_encode(proposal_id));
  if (res.status == 404) return std::nullopt;
  if (res.status != 200) protocol_error("forum: HTTP " + std::to_string(res.status));
  try {
    ForumSignal f = forum_from_json(parse_body(res, "forum"));
    validate_forum_signal(f);
    return f;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSourceProtocolError) throw;
    protocol_error(std::string("forum: malformed signal: ") + e.what());
  }
}

namespace {

const std::unordered_set<std::string>& positive_words() {
  static const std::unordered_set<std::string> w{
      "support", "supports", "good", "great", "agree", "benefit", "beneficial",
      "positive", "approve", "favor", "excellent", "yes", "like", "growth",
      "strong", "love", "useful", "improve", "improvement"};
  return w;
}

const std::unordered_set<std::string>& negative_words() {
  static const std::unordered_set<std::string> w{
      "against", "bad", "oppose", "disagree", "risk", "risky", "negative",
      "reject", "concern", "concerns", "no", "poor", "harm", "harmful",
      "weak", "worse", "dislike", "waste", "dangerous"};
  return w;
}

}  // namespace

double lexicon_score(std::string_view text) {
  std::size_t pos_hits = 0;
  std::size_t neg_hits = 0;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (positive_words().count(word)) ++pos_hits;
    if (negative_words().count(word)) ++neg_hits;
    word.clear();
  };
  for (unsigned char c : text) {
    if (std::isalpha(c)) {
      word += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  const std::size_t total = pos_hits + neg_hits;
  if (total == 0) return 0.0;
  return (static_cast<double>(pos_hits) - static_cast<double>(neg_hits)) /
         static_cast<double>(total);
}

Polarity lexicon_polarity(std::string_view text) {
  const double s = lexicon_score(text);
  if (s > 0) return Polarity::kPositive;
  if (s < 0) return Polarity::kNegative;
  return Polarity::kNeutral;
}

ForumSignal score_forum_thread(const std::string& proposal_id, const std::string& url,
                               std::span<const RawComment> comments) {
  ForumSignal f;
  f.proposal_id = proposal_id;
  f.url = url;
  double score_sum = 0.0;
  for (const auto& c : comments) {
    const double s = lexicon_score(c.text);
    score_sum += s;
    f.comments.push_back({c.timestamp, s > 0   ? Polarity::kPositive
                                       : s < 0 ? Polarity::kNegative
                                               : Polarity::kNeutral});
  }
  std::stable_sort(f.comments.begin(), f.comments.end(),
                   [](const ForumComment& a, const ForumComment& b) {
                     return a.timestamp < b.timestamp;
                   });
  f.counts = count_polarities(f.comments);
  const double decided = static_cast<double>(f.counts.positive + f.counts.negative);
  f.stance_score = decided > 0 ? (static_cast<double>(f.counts.positive) -
                                  static_cast<double>(f.counts.negative)) / decided
                               : 0.0;
  f.sentiment = comments.empty() ? 0.0 : score_sum / static_cast<double>(comments.size());
  return f;
}

void apply_label_file(const std::filesystem::path& path, std::vector<Proposal>& proposals) {
  const std::string text = read_file(path);
  std::map<std::string, Json> labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j = Json::parse(line);
      labels[require_string(j, "id")] = j;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kLoadError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& p : proposals) {
    auto it = labels.find(p.id);
    if (it == labels.end()) continue;
    const Json& j = it->second;
    if (j.contains("category") && j["category"].is_string()) {
      p.category = j["category"].get<std::string>();
    }
    if (j.contains("calls_for_change") && j["calls_for_change"].is_boolean()) {
      p.calls_for_change = j["calls_for_change"].get<bool>();
    }
  }
}

}  // namespace daoeval

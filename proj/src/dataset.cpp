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

#include "daoeval/dataset.hpp"

#include <cmath>

#include "daoeval/error.hpp"

namespace daoeval {

std::string_view to_string(MarketMetric metric) {
  switch (metric) {
    case MarketMetric::kPrice: return "price";
    case MarketMetric::kTvl: return "tvl";
    case MarketMetric::kTreasury: return "treasury";
    case MarketMetric::kIndex: return "index";
  }
  return "price";
}

MarketMetric parse_market_metric(std::string_view text) {
  if (text == "price") return MarketMetric::kPrice;
  if (text == "tvl") return MarketMetric::kTvl;
  if (text == "treasury") return MarketMetric::kTreasury;
  if (text == "index") return MarketMetric::kIndex;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown market metric '" + std::string(text) + "'");
}

void validate_market_series(const MarketSeries& series) {
  const bool nonneg = series.metric == MarketMetric::kTvl ||
                      series.metric == MarketMetric::kTreasury;
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const auto& s = series.samples[i];
    if (i > 0 && s.day <= series.samples[i - 1].day) {
      throw Error(ErrorCode::kInvalidRecord,
                  "market series " + series.protocol + "/" +
                      std::string(to_string(series.metric)) +
                      ": days not strictly increasing");
    }
    if (!std::isfinite(s.value) || (nonneg && s.value < 0.0)) {
      throw Error(ErrorCode::kInvalidRecord,
                  "market series " + series.protocol + "/" +
                      std::string(to_string(series.metric)) +
                      ": invalid value on day " + std::to_string(s.day));
    }
  }
}

DatasetIndex::DatasetIndex(const Dataset& dataset) : dataset_(&dataset) {
  for (std::size_t i = 0; i < dataset.proposals.size(); ++i) {
    const auto& p = dataset.proposals[i];
    if (!proposal_pos_.emplace(p.id, i).second) {
      throw Error(ErrorCode::kInvalidRecord, "duplicate proposal id '" + p.id + "'");
    }
    ids_.push_back(p.id);
  }
  for (const auto& v : dataset.votes) votes_[v.proposal_id].push_back(v);
  for (std::size_t i = 0; i < dataset.forum.size(); ++i) {
    forum_pos_.emplace(dataset.forum[i].proposal_id, i);
  }
  for (std::size_t i = 0; i < dataset.market.size(); ++i) {
    const auto& s = dataset.market[i];
    series_pos_.emplace(std::make_pair(s.protocol, s.metric), i);
  }
}

const Proposal* DatasetIndex::find_proposal(std::string_view id) const {
  auto it = proposal_pos_.find(id);
  return it == proposal_pos_.end() ? nullptr : &dataset_->proposals[it->second];
}

const Proposal& DatasetIndex::proposal(std::string_view id) const {
  const Proposal* p = find_proposal(id);
  if (!p) {
    throw Error(ErrorCode::kNotFound, "proposal '" + std::string(id) + "' not in dataset");
  }
  return *p;
}

std::span<const VoteRecord> DatasetIndex::votes_for(
    std::string_view proposal_id) const {
  auto it = votes_.find(proposal_id);
  if (it == votes_.end()) return {};
  return it->second;
}

const ForumSignal* DatasetIndex::forum_for(std::string_view proposal_id) const {
  auto it = forum_pos_.find(proposal_id);
  return it == forum_pos_.end() ? nullptr : &dataset_->forum[it->second];
}

const MarketSeries* DatasetIndex::series(std::string_view protocol,
                                         MarketMetric metric) const {
  auto it = series_pos_.find(std::make_pair(std::string(protocol), metric));
  return it == series_pos_.end() ? nullptr : &dataset_->market[it->second];
}

}  // namespace daoeval

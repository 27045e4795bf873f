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

#ifndef DAOEVAL_DATASET_HPP_
#define DAOEVAL_DATASET_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/model.hpp"

namespace daoeval {

enum class MarketMetric { kPrice, kTvl, kTreasury, kIndex };
std::string_view to_string(MarketMetric metric);
MarketMetric parse_market_metric(std::string_view text);

struct MarketSample {
  Day day = 0;
  double value = 0.0;
  bool operator==(const MarketSample&) const = default;
};

/// Daily samples, days strictly increasing. Gaps are kept as missing days.
struct MarketSeries {
  std::string protocol;
  MarketMetric metric = MarketMetric::kPrice;
  std::vector<MarketSample> samples;
  bool operator==(const MarketSeries&) const = default;
};

void validate_market_series(const MarketSeries& series);

/// Everything the pipeline reads. Immutable once loaded.
struct Dataset {
  std::vector<Proposal> proposals;
  std::vector<VoteRecord> votes;
  std::vector<ForumSignal> forum;
  std::vector<MarketSeries> market;
  bool operator==(const Dataset&) const = default;
};

/// Read-only lookup tables over a Dataset. The dataset must outlive the index.
class DatasetIndex {
 public:
  explicit DatasetIndex(const Dataset& dataset);

  const Dataset& dataset() const { return *dataset_; }

  const Proposal* find_proposal(std::string_view id) const;
  /// Throws kNotFound.
  const Proposal& proposal(std::string_view id) const;
  std::span<const VoteRecord> votes_for(std::string_view proposal_id) const;
  const ForumSignal* forum_for(std::string_view proposal_id) const;
  const MarketSeries* series(std::string_view protocol, MarketMetric metric) const;

  /// Proposal ids in dataset order.
  const std::vector<std::string>& proposal_ids() const { return ids_; }

 private:
  const Dataset* dataset_;
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t, std::less<>> proposal_pos_;
  std::map<std::string, std::vector<VoteRecord>, std::less<>> votes_;
  std::map<std::string, std::size_t, std::less<>> forum_pos_;
  std::map<std::pair<std::string, MarketMetric>, std::size_t> series_pos_;
};

}  // namespace daoeval

#endif  // DAOEVAL_DATASET_HPP_

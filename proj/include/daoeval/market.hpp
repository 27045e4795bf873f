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

// Event-study responses of price, TVL and treasury series around the close
// of a proposal.

#ifndef DAOEVAL_MARKET_HPP_
#define DAOEVAL_MARKET_HPP_

#include <optional>
#include <span>
#include <string>

#include "daoeval/dataset.hpp"
#include "daoeval/model.hpp"

namespace daoeval {

class Diagnostics;

/// (postAvg / preAvg - 1) * 100. Throws kNoData for an empty segment and
/// kDegenerateBaseline when preAvg <= 0.
double windowed_pct_change(std::span<const double> pre, std::span<const double> post);

/// postAvg / preAvg - 1, same errors as windowed_pct_change.
double relative_change(std::span<const double> pre, std::span<const double> post);

/// [(tokenPost/tokenPre - 1) - (indexPost/indexPre - 1)] * 100. Errors name the
/// failing series ("token" or "index").
double market_adjusted_return(std::span<const double> token_pre,
                              std::span<const double> token_post,
                              std::span<const double> index_pre,
                              std::span<const double> index_post);

struct SegmentCoverage {
  std::size_t pre = 0;
  std::size_t post = 0;
  bool operator==(const SegmentCoverage&) const = default;
};

struct MarketWindow {
  std::string proposal_id;
  int window_days = 3;
  Day event_day = 0;
  std::optional<double> price_pct_change;  // percent
  std::optional<double> adj_return;        // percent, index-adjusted
  std::optional<double> tvl_abnormal;      // fraction
  std::optional<double> treasury_abnormal; // fraction
  SegmentCoverage price_coverage;
  SegmentCoverage index_coverage;
  SegmentCoverage tvl_coverage;
  SegmentCoverage treasury_coverage;

  bool operator==(const MarketWindow&) const = default;
};

struct SeriesBundle {
  const MarketSeries* price = nullptr;
  const MarketSeries* index = nullptr;
  const MarketSeries* tvl = nullptr;
  const MarketSeries* treasury = nullptr;
};

/// Pre segment is days [event-w, event), post is (event, event+w]; the event
/// day (UTC day of the proposal end) belongs to neither. Missing series or
/// degenerate baselines leave the field absent with its coverage recorded.
MarketWindow compute_market_window(const Proposal& proposal, const SeriesBundle& bundle,
                                   int window_days = 3, Diagnostics* diag = nullptr);

/// Last second of the window's post segment; the window is only known to an
/// observer at or after this instant.
Timestamp market_window_available_at(const MarketWindow& window);

}  // namespace daoeval

#endif  // DAOEVAL_MARKET_HPP_

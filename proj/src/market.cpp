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

#include "daoeval/market.hpp"

#include <vector>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"

namespace daoeval {
namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double ratio_of_means(std::span<const double> pre, std::span<const double> post,
                      const std::string& label) {
  const std::string prefix = label.empty() ? std::string() : label + " ";
  if (pre.empty()) throw Error(ErrorCode::kNoData, prefix + "pre segment is empty");
  if (post.empty()) throw Error(ErrorCode::kNoData, prefix + "post segment is empty");
  const double pre_avg = mean(pre);
  if (!(pre_avg > 0.0)) {
    throw Error(ErrorCode::kDegenerateBaseline, prefix + "pre-event average is not positive");
  }
  return mean(post) / pre_avg;
}

struct Segments {
  std::vector<double> pre;
  std::vector<double> post;
};

Segments split(const MarketSeries* series, Day event_day, int w) {
  Segments s;
  if (!series) return s;
  for (const auto& sample : series->samples) {
    if (sample.day >= event_day - w && sample.day < event_day) s.pre.push_back(sample.value);
    if (sample.day > event_day && sample.day <= event_day + w) s.post.push_back(sample.value);
  }
  return s;
}

}  // namespace

double windowed_pct_change(std::span<const double> pre, std::span<const double> post) {
  return (ratio_of_means(pre, post, "") - 1.0) * 100.0;
}

double relative_change(std::span<const double> pre, std::span<const double> post) {
  return ratio_of_means(pre, post, "") - 1.0;
}

double market_adjusted_return(std::span<const double> token_pre,
                              std::span<const double> token_post,
                              std::span<const double> index_pre,
                              std::span<const double> index_post) {
  const double token = ratio_of_means(token_pre, token_post, "token") - 1.0;
  const double index = ratio_of_means(index_pre, index_post, "index") - 1.0;
  return (token - index) * 100.0;
}

MarketWindow compute_market_window(const Proposal& proposal, const SeriesBundle& bundle,
                                   int window_days, Diagnostics* diag) {
  if (window_days < 1) {
    throw Error(ErrorCode::kInvalidArgument, "window_days must be at least 1");
  }
  MarketWindow w;
  w.proposal_id = proposal.id;
  w.window_days = window_days;
  w.event_day = day_of(proposal.end);

  const Segments price = split(bundle.price, w.event_day, window_days);
  const Segments index = split(bundle.index, w.event_day, window_days);
  const Segments tvl = split(bundle.tvl, w.event_day, window_days);
  const Segments treasury = split(bundle.treasury, w.event_day, window_days);
  w.price_coverage = {price.pre.size(), price.post.size()};
  w.index_coverage = {index.pre.size(), index.post.size()};
  w.tvl_coverage = {tvl.pre.size(), tvl.post.size()};
  w.treasury_coverage = {treasury.pre.size(), treasury.post.size()};

  auto attempt = [&](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateBaseline && diag) {
        diag->Warn(warn::kDegenerateBaseline, proposal.id + ": " + e.what());
      }
      if (e.code() != ErrorCode::kNoData && e.code() != ErrorCode::kDegenerateBaseline) throw;
      return std::nullopt;
    }
  };
  w.price_pct_change = attempt([&] { return windowed_pct_change(price.pre, price.post); });
  w.adj_return = attempt(
      [&] { return market_adjusted_return(price.pre, price.post, index.pre, index.post); });
  w.tvl_abnormal = attempt([&] { return relative_change(tvl.pre, tvl.post); });
  w.treasury_abnormal = attempt([&] { return relative_change(treasury.pre, treasury.post); });
  return w;
}

Timestamp market_window_available_at(const MarketWindow& window) {
  return (window.event_day + window.window_days + 1) * kSecondsPerDay - 1;
}

}  // namespace daoeval

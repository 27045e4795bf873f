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

// Temporal participation features of one proposal's ballot stream: who led
// the cumulative tally and when, how concentrated the winner's support was,
// and whether voting power arrived early or late.

#ifndef DAOEVAL_DYNAMICS_HPP_
#define DAOEVAL_DYNAMICS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "daoeval/model.hpp"

namespace daoeval {

class Diagnostics;

inline constexpr std::size_t kQuartiles = 4;

struct SeriesEvent {
  Timestamp timestamp = 0;
  std::string voter;
  ChoiceWeights weights;
  double vp = 0.0;
  std::size_t quartile = 0;  // 0..3
};

struct SeriesMeta {
  std::size_t unique_voters = 0;
  std::size_t total_votes = 0;
  std::optional<Timestamp> first_ts;
  std::optional<Timestamp> last_ts;
  std::array<double, kQuartiles> per_quartile_vp{};
  std::array<std::size_t, kQuartiles> per_quartile_votes{};
};

struct ParticipationSeries {
  std::string proposal_id;
  std::size_t n_options = 0;
  Timestamp window_start = 0;
  Timestamp window_end = 0;
  std::vector<SeriesEvent> events;  // by timestamp, then voter
  SeriesMeta meta;
};

/// Quartile of the official voting window holding `ts`: four equal
/// sub-intervals, half-open except the last, which includes `end`.
std::size_t quartile_of(Timestamp start, Timestamp end, Timestamp ts);

/// Ballots outside the voting window are dropped and counted.
ParticipationSeries build_participation_series(const Proposal& proposal,
                                               std::span<const VoteRecord> votes,
                                               Diagnostics* diag = nullptr);

struct LeadMetrics {
  std::array<std::vector<double>, kQuartiles> by_quartile;
  std::vector<double> total;
  std::vector<double> early;
};

/// Leadership is sampled after every event; an option scores a hit only when
/// its cumulative power strictly exceeds every other option's.
LeadMetrics lead_metrics(const ParticipationSeries& series);

struct SpikeMetrics {
  double spike_index = 0.0;
  double follow_support_ratio = 0.0;
  std::size_t spike_event = 0;
  bool overflow = false;    // largest step exceeded the winner's total
  bool empty_tail = false;  // no voting power after the spike
};

/// Throws kDegenerateSeries when the winner received no voting power.
SpikeMetrics spike_metrics(const ParticipationSeries& series, std::size_t winner);

/// 1 - (mass of the top decile of winner contributions) / (winner total).
/// Throws kDegenerateSeries when no event allocates power to the winner.
double stairwise_ratio(const ParticipationSeries& series, std::size_t winner);

/// Mean per-event power in the late half of the window minus the early half;
/// an empty half counts as 0.
double half_slope_diff(const ParticipationSeries& series);

struct DynamicsFeatures {
  std::size_t winner = 0;
  LeadMetrics lead;
  std::optional<SpikeMetrics> spike;   // absent for a degenerate winner
  std::optional<double> stairwise;     // absent for a degenerate winner
  double half_slope_diff = 0.0;
};

DynamicsFeatures compute_dynamics(const ParticipationSeries& series, std::size_t winner);

/// CSV export, one row per proposal. Vector-valued columns join entries with
/// ';' and quartile rows with '|'.
std::string dynamics_csv_header();
std::string dynamics_csv_row(const ParticipationSeries& series,
                             const DynamicsFeatures& features);

}  // namespace daoeval

#endif  // DAOEVAL_DYNAMICS_HPP_

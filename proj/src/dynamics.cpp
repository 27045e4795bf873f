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

#include "daoeval/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"

namespace daoeval {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += fmt_double(v[i]);
  }
  return out;
}

double winner_total(const ParticipationSeries& series, std::size_t winner) {
  double total = 0.0;
  for (const auto& e : series.events) total += e.vp * e.weights[winner];
  return total;
}

void check_winner(const ParticipationSeries& series, std::size_t winner) {
  if (winner >= series.n_options) {
    throw Error(ErrorCode::kInvalidArgument, "winner index outside the option range");
  }
}

}  // namespace

std::size_t quartile_of(Timestamp start, Timestamp end, Timestamp ts) {
  const __int128 span = static_cast<__int128>(end) - start;
  const __int128 offset = static_cast<__int128>(ts) - start;
  if (span <= 0 || offset <= 0) return 0;
  const __int128 q = (offset * static_cast<__int128>(kQuartiles)) / span;
  return static_cast<std::size_t>(std::min<__int128>(q, kQuartiles - 1));
}

ParticipationSeries build_participation_series(const Proposal& proposal,
                                               std::span<const VoteRecord> votes,
                                               Diagnostics* diag) {
  ParticipationSeries s;
  s.proposal_id = proposal.id;
  s.n_options = proposal.choices.size();
  s.window_start = proposal.start;
  s.window_end = proposal.end;
  s.events.reserve(votes.size());
  for (const auto& v : votes) {
    if (!in_voting_window(proposal, v.timestamp)) {
      if (diag) diag->Warn(warn::kVoteOutOfWindow, proposal.id + "/" + v.voter);
      continue;
    }
    SeriesEvent e;
    e.timestamp = v.timestamp;
    e.voter = v.voter;
    e.weights = normalize_choice(v.choice, s.n_options);
    e.vp = v.vp;
    e.quartile = quartile_of(proposal.start, proposal.end, v.timestamp);
    s.events.push_back(std::move(e));
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const SeriesEvent& a, const SeriesEvent& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.voter < b.voter;
                   });
  std::set<std::string_view> voters;
  for (const auto& e : s.events) {
    voters.insert(e.voter);
    s.meta.per_quartile_vp[e.quartile] += e.vp;
    ++s.meta.per_quartile_votes[e.quartile];
  }
  s.meta.unique_voters = voters.size();
  s.meta.total_votes = s.events.size();
  if (!s.events.empty()) {
    s.meta.first_ts = s.events.front().timestamp;
    s.meta.last_ts = s.events.back().timestamp;
  }
  return s;
}

LeadMetrics lead_metrics(const ParticipationSeries& series) {
  const std::size_t n = series.n_options;
  std::array<std::vector<std::size_t>, kQuartiles> hits;
  for (auto& h : hits) h.assign(n, 0);
  std::vector<double> cumulative(n, 0.0);
  for (const auto& e : series.events) {
    for (std::size_t o = 0; o < n; ++o) cumulative[o] += e.vp * e.weights[o];
    const auto [leader, tie] = argmax_lowest(cumulative);
    if (!tie) ++hits[e.quartile][leader];
  }

  LeadMetrics out;
  std::vector<double> total_hits(n, 0.0);
  for (std::size_t q = 0; q < kQuartiles; ++q) {
    const double denom =
        std::max<double>(1.0, static_cast<double>(series.meta.per_quartile_votes[q]));
    out.by_quartile[q].resize(n);
    for (std::size_t o = 0; o < n; ++o) {
      out.by_quartile[q][o] = static_cast<double>(hits[q][o]) / denom;
      total_hits[o] += static_cast<double>(hits[q][o]);
    }
  }
  double all_hits = 0.0;
  for (double h : total_hits) all_hits += h;
  out.total.assign(n, 0.0);
  if (all_hits > 0.0) {
    for (std::size_t o = 0; o < n; ++o) out.total[o] = total_hits[o] / all_hits;
  }
  double q1_hits = 0.0;
  for (auto h : hits[0]) q1_hits += static_cast<double>(h);
  out.early.resize(n);
  for (std::size_t o = 0; o < n; ++o) {
    out.early[o] = static_cast<double>(hits[0][o]) / std::max(1.0, q1_hits);
  }
  return out;
}

SpikeMetrics spike_metrics(const ParticipationSeries& series, std::size_t winner) {
  check_winner(series, winner);
  const double total = winner_total(series, winner);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateSeries,
                "proposal '" + series.proposal_id + "': winner has no voting power");
  }
  SpikeMetrics m;
  double max_step = -1.0;
  for (std::size_t i = 0; i < series.events.size(); ++i) {
    if (series.events[i].vp > max_step) {
      max_step = series.events[i].vp;
      m.spike_event = i;
    }
  }
  const double raw = max_step / total;
  m.overflow = raw > 1.0;
  m.spike_index = std::clamp(raw, 0.0, 1.0);

  double after_total = 0.0;
  double after_winner = 0.0;
  for (std::size_t i = m.spike_event + 1; i < series.events.size(); ++i) {
    const auto& e = series.events[i];
    after_total += e.vp;
    after_winner += e.vp * e.weights[winner];
  }
  if (after_total > 0.0) {
    m.follow_support_ratio = after_winner / after_total;
  } else {
    m.empty_tail = true;
  }
  return m;
}

double stairwise_ratio(const ParticipationSeries& series, std::size_t winner) {
  check_winner(series, winner);
  std::vector<double> contributions;
  for (const auto& e : series.events) {
    if (e.weights[winner] > 0.0) contributions.push_back(e.vp * e.weights[winner]);
  }
  double total = 0.0;
  for (double c : contributions) total += c;
  if (contributions.empty() || !(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateSeries,
                "proposal '" + series.proposal_id + "': no winner-allocated power");
  }
  const std::size_t k = contributions.size();
  const std::size_t top = (k + 9) / 10;  // ceil(0.1 k)
  std::partial_sort(contributions.begin(), contributions.begin() + static_cast<long>(top),
                    contributions.end(), std::greater<>());
  double top_mass = 0.0;
  for (std::size_t i = 0; i < top; ++i) top_mass += contributions[i];
  return 1.0 - top_mass / total;
}

double half_slope_diff(const ParticipationSeries& series) {
  const __int128 span = static_cast<__int128>(series.window_end) - series.window_start;
  double early_sum = 0.0, late_sum = 0.0;
  std::size_t early_n = 0, late_n = 0;
  for (const auto& e : series.events) {
    const __int128 offset = static_cast<__int128>(e.timestamp) - series.window_start;
    if (2 * offset < span) {
      early_sum += e.vp;
      ++early_n;
    } else {
      late_sum += e.vp;
      ++late_n;
    }
  }
  const double early = early_n ? early_sum / static_cast<double>(early_n) : 0.0;
  const double late = late_n ? late_sum / static_cast<double>(late_n) : 0.0;
  return late - early;
}

DynamicsFeatures compute_dynamics(const ParticipationSeries& series, std::size_t winner) {
  DynamicsFeatures f;
  f.winner = winner;
  f.lead = lead_metrics(series);
  try {
    f.spike = spike_metrics(series, winner);
    f.stairwise = stairwise_ratio(series, winner);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateSeries) throw;
    f.spike.reset();
    f.stairwise.reset();
  }
  f.half_slope_diff = half_slope_diff(series);
  return f;
}

std::string dynamics_csv_header() {
  return "proposal_id,n_options,winner,unique_voters,total_votes,first_ts,last_ts,"
         "q1_vp,q2_vp,q3_vp,q4_vp,spike_index,spike_overflow,"
         "spike_follow_support_ratio,spike_empty_tail,stairwise_ratio,half_slope_diff,"
         "lead_ratio_total,early_ratio,lead_ratio_by_quartile";
}

std::string dynamics_csv_row(const ParticipationSeries& s, const DynamicsFeatures& f) {
  std::string row;
  auto add = [&](const std::string& v) {
    if (!row.empty()) row += ',';
    row += v;
  };
  add(s.proposal_id);
  add(std::to_string(s.n_options));
  add(std::to_string(f.winner + 1));
  add(std::to_string(s.meta.unique_voters));
  add(std::to_string(s.meta.total_votes));
  add(s.meta.first_ts ? std::to_string(*s.meta.first_ts) : "");
  add(s.meta.last_ts ? std::to_string(*s.meta.last_ts) : "");
  for (double v : s.meta.per_quartile_vp) add(fmt_double(v));
  add(f.spike ? fmt_double(f.spike->spike_index) : "");
  add(f.spike ? (f.spike->overflow ? "1" : "0") : "");
  add(f.spike ? fmt_double(f.spike->follow_support_ratio) : "");
  add(f.spike ? (f.spike->empty_tail ? "1" : "0") : "");
  add(f.stairwise ? fmt_double(*f.stairwise) : "");
  add(fmt_double(f.half_slope_diff));
  add(join(f.lead.total, ';'));
  add(join(f.lead.early, ';'));
  std::string quartiles;
  for (std::size_t q = 0; q < kQuartiles; ++q) {
    if (q) quartiles += '|';
    quartiles += join(f.lead.by_quartile[q], ';');
  }
  add(quartiles);
  return row;
}

}  // namespace daoeval

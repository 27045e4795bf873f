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

#include "daoeval/model.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"

namespace daoeval {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len,
                 int& out) {
  if (pos + len > text.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    v = v * 10 + (text[i] - '0');
  }
  out = v;
  return true;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw Error(ErrorCode::kInvalidRecord,
              "unparsable timestamp '" + std::string(text) + "'");
}

}  // namespace

Day day_of(Timestamp ts) {
  // Floor division so pre-epoch stamps land on the right day.
  Day d = ts / kSecondsPerDay;
  if (ts % kSecondsPerDay < 0) --d;
  return d;
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const Day day = day_of(ts);
  const year_month_day ymd{sys_days{days{day}}};
  const Timestamp rem = ts - day * kSecondsPerDay;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_fixed(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !parse_fixed(text, 5, 2, mo) || text[7] != '-' ||
      !parse_fixed(text, 8, 2, d)) {
    bad_timestamp(text);
  }
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    if (!parse_fixed(text, pos + 1, 2, h) || text.size() < pos + 9 ||
        text[pos + 3] != ':' || !parse_fixed(text, pos + 4, 2, mi) ||
        text[pos + 6] != ':' || !parse_fixed(text, pos + 7, 2, s)) {
      bad_timestamp(text);
    }
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      }
    }
  }
  const std::string_view zone = text.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00")) bad_timestamp(text);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) bad_timestamp(text);
  const Day dn = sys_days{ymd}.time_since_epoch().count();
  return dn * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::string_view to_string(ProposalKind kind) {
  return kind == ProposalKind::kBinary ? "binary" : "multi";
}

std::string_view to_string(Polarity polarity) {
  switch (polarity) {
    case Polarity::kPositive: return "positive";
    case Polarity::kNegative: return "negative";
    case Polarity::kNeutral: return "neutral";
  }
  return "neutral";
}

void validate_proposal(const Proposal& proposal) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidProposal,
                "proposal '" + proposal.id + "': " + why);
  };
  if (proposal.id.empty()) fail("empty id");
  if (proposal.choices.size() < 2) fail("fewer than two choices");
  std::set<std::string> seen;
  for (const auto& c : proposal.choices) {
    if (!seen.insert(trim(c)).second) fail("duplicate choice label '" + c + "'");
  }
  if (proposal.start >= proposal.end) fail("start must precede end");
  if (proposal.created_at && *proposal.created_at > proposal.start) {
    fail("created_at after start");
  }
}

const std::vector<std::string>& default_abstain_labels() {
  static const std::vector<std::string> labels{"abstain"};
  return labels;
}

bool is_abstain_label(std::string_view label,
                      std::span<const std::string> abstain_labels) {
  const std::string norm = lower(trim(label));
  return std::any_of(abstain_labels.begin(), abstain_labels.end(),
                     [&](const std::string& a) { return lower(trim(a)) == norm; });
}

ProposalKind classify_proposal_kind(const Proposal& proposal,
                                    std::span<const std::string> abstain_labels) {
  const auto kept = std::count_if(
      proposal.choices.begin(), proposal.choices.end(),
      [&](const std::string& c) { return !is_abstain_label(c, abstain_labels); });
  return kept == 2 ? ProposalKind::kBinary : ProposalKind::kMulti;
}

ChoiceWeights normalize_choice(const ChoiceExpr& expr, std::size_t n_options) {
  if (n_options == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_options must be positive");
  }
  auto check_index = [&](std::size_t idx) {
    if (idx < 1 || idx > n_options) {
      throw Error(ErrorCode::kInvalidChoice,
                  "choice index " + std::to_string(idx) + " outside 1.." +
                      std::to_string(n_options));
    }
  };
  ChoiceWeights out;
  out.allocation.assign(n_options, 0.0);
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SingleChoice>) {
          check_index(c.option);
          out.allocation[c.option - 1] = 1.0;
        } else if constexpr (std::is_same_v<T, ApprovalChoice>) {
          if (c.options.empty()) {
            throw Error(ErrorCode::kInvalidChoice, "empty approval ballot");
          }
          std::set<std::size_t> distinct;
          for (auto idx : c.options) {
            check_index(idx);
            distinct.insert(idx);
          }
          const double share = 1.0 / static_cast<double>(distinct.size());
          for (auto idx : distinct) out.allocation[idx - 1] = share;
        } else {
          double sum = 0.0;
          for (const auto& [idx, w] : c.weights) {
            check_index(idx);
            if (!(w >= 0.0) || !std::isfinite(w)) {
              throw Error(ErrorCode::kInvalidChoice,
                          "weighted ballot has a negative or non-finite weight");
            }
            sum += w;
          }
          if (!(sum > 0.0)) {
            throw Error(ErrorCode::kInvalidChoice,
                        "weighted ballot has no positive weight");
          }
          for (const auto& [idx, w] : c.weights) out.allocation[idx - 1] = w / sum;
        }
      },
      expr);
  return out;
}

bool in_voting_window(const Proposal& proposal, Timestamp ts) {
  return ts >= proposal.start && ts <= proposal.end;
}

void validate_vote(const VoteRecord& vote, const Proposal& proposal) {
  if (vote.proposal_id != proposal.id) {
    throw Error(ErrorCode::kInvalidRecord,
                "vote by " + vote.voter + " belongs to '" + vote.proposal_id +
                    "', not '" + proposal.id + "'");
  }
  if (vote.voter.empty()) {
    throw Error(ErrorCode::kInvalidRecord, "vote without voter address");
  }
  if (!(vote.vp >= 0.0) || !std::isfinite(vote.vp)) {
    throw Error(ErrorCode::kInvalidRecord,
                "vote by " + vote.voter + " has negative or non-finite vp");
  }
  normalize_choice(vote.choice, proposal.choices.size());
  if (!in_voting_window(proposal, vote.timestamp)) {
    throw Error(ErrorCode::kInvalidRecord,
                "vote by " + vote.voter + " outside the voting window");
  }
}

std::vector<VoteRecord> deduplicate_ballots(std::vector<VoteRecord> votes,
                                            Diagnostics* diag) {
  // Latest timestamp wins; on equal stamps the later record wins.
  std::map<std::pair<std::string, std::string>, std::size_t> keep;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    auto key = std::make_pair(votes[i].proposal_id, votes[i].voter);
    auto [it, inserted] = keep.emplace(key, i);
    if (!inserted && votes[i].timestamp >= votes[it->second].timestamp) {
      it->second = i;
    }
  }
  if (keep.size() == votes.size()) return votes;
  std::vector<bool> retained(votes.size(), false);
  for (const auto& [key, idx] : keep) retained[idx] = true;
  std::vector<VoteRecord> out;
  out.reserve(keep.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (retained[i]) {
      out.push_back(std::move(votes[i]));
    } else if (diag) {
      diag->Warn(warn::kDuplicateBallot,
                 votes[i].proposal_id + "/" + votes[i].voter);
    }
  }
  return out;
}

std::pair<std::size_t, bool> argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
      tie = false;
    } else if (values[i] == values[best]) {
      tie = true;
    }
  }
  return {best, tie};
}

ProposalOutcome tally_outcome(const Proposal& proposal,
                              std::span<const VoteRecord> votes) {
  if (votes.empty()) {
    throw Error(ErrorCode::kEmptyTally,
                "proposal '" + proposal.id + "' has no ballots to tally");
  }
  const std::size_t n = proposal.choices.size();
  std::vector<std::size_t> order(votes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& va = votes[a];
    const auto& vb = votes[b];
    if (va.voter != vb.voter) return va.voter < vb.voter;
    if (va.timestamp != vb.timestamp) return va.timestamp < vb.timestamp;
    return va.vp < vb.vp;
  });

  ProposalOutcome out;
  out.per_option_vp.assign(n, 0.0);
  std::unordered_set<std::string_view> voters;
  for (auto idx : order) {
    const auto& v = votes[idx];
    if (v.proposal_id != proposal.id) {
      throw Error(ErrorCode::kInvalidRecord,
                  "ballot for '" + v.proposal_id + "' passed to tally of '" +
                      proposal.id + "'");
    }
    const ChoiceWeights w = normalize_choice(v.choice, n);
    for (std::size_t o = 0; o < n; ++o) {
      if (w[o] != 0.0) out.per_option_vp[o] += v.vp * w[o];
    }
    out.total_vp += v.vp;
    voters.insert(v.voter);
  }
  out.n_voters = voters.size();
  std::tie(out.final_option, out.tie) = argmax_lowest(out.per_option_vp);
  return out;
}

void validate_forum_signal(const ForumSignal& signal) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvalidRecord,
                "forum signal for '" + signal.proposal_id + "': " + why);
  };
  if (!(signal.stance_score >= -1.0 && signal.stance_score <= 1.0)) {
    fail("stance_score outside [-1,1]");
  }
  if (!(signal.sentiment >= -1.0 && signal.sentiment <= 1.0)) {
    fail("sentiment outside [-1,1]");
  }
  if (!signal.comments.empty() && count_polarities(signal.comments) != signal.counts) {
    fail("comment counts disagree with the comment list");
  }
}

CommentCounts count_polarities(std::span<const ForumComment> comments) {
  CommentCounts c;
  for (const auto& cm : comments) {
    switch (cm.polarity) {
      case Polarity::kPositive: ++c.positive; break;
      case Polarity::kNegative: ++c.negative; break;
      case Polarity::kNeutral: ++c.neutral; break;
    }
  }
  return c;
}

EvaluationSet build_evaluation_set(std::span<const std::string> proposal_ids,
                                   std::span<const VoteRecord> votes) {
  EvaluationSet set;
  set.proposals.assign(proposal_ids.begin(), proposal_ids.end());
  std::unordered_set<std::string_view> in_p(proposal_ids.begin(),
                                            proposal_ids.end());
  std::map<std::string, std::set<std::string>> index;
  for (const auto& v : votes) {
    if (in_p.count(v.proposal_id)) index[v.voter].insert(v.proposal_id);
  }
  for (auto& [voter, ids] : index) {
    set.per_voter.emplace(voter, std::vector<std::string>(ids.begin(), ids.end()));
  }
  return set;
}

}  // namespace daoeval

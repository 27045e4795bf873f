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

// Governance records shared by every stage: proposals, ballots, tallies and
// forum signals, plus the pure functions that normalize and tally ballots.
//
// Option indices are 0-based everywhere in C++. Ballot choice expressions
// keep the 1-based indices used on the wire by Snapshot so that a record can
// be stored and reloaded unchanged.

#ifndef DAOEVAL_MODEL_HPP_
#define DAOEVAL_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace daoeval {

class Diagnostics;

/// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;
/// UTC day number (seconds / 86400, floored).
using Day = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

Day day_of(Timestamp ts);
std::string format_iso8601(Timestamp ts);
/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" with optional fractional
/// seconds and a trailing "Z" or "+00:00". Throws kInvalidRecord otherwise.
Timestamp parse_iso8601(std::string_view text);

enum class ProposalKind { kBinary, kMulti };
std::string_view to_string(ProposalKind kind);

struct Proposal {
  std::string id;
  std::string space_id;
  std::string title;
  std::optional<std::string> body;
  std::vector<std::string> choices;
  std::optional<Timestamp> created_at;
  Timestamp start = 0;
  Timestamp end = 0;
  std::optional<bool> calls_for_change;
  std::optional<std::string> category;

  bool operator==(const Proposal&) const = default;
};

/// Throws kInvalidProposal when the choice list or voting window is malformed.
void validate_proposal(const Proposal& proposal);

const std::vector<std::string>& default_abstain_labels();

/// Binary iff exactly two labels remain after dropping abstain-like labels
/// (case-insensitive, whitespace-trimmed).
ProposalKind classify_proposal_kind(
    const Proposal& proposal,
    std::span<const std::string> abstain_labels = default_abstain_labels());

bool is_abstain_label(std::string_view label,
                      std::span<const std::string> abstain_labels =
                          default_abstain_labels());

// Ballot expressions, 1-based option indices.
struct SingleChoice {
  std::size_t option = 1;
  bool operator==(const SingleChoice&) const = default;
};
struct ApprovalChoice {
  std::vector<std::size_t> options;
  bool operator==(const ApprovalChoice&) const = default;
};
struct WeightedChoice {
  std::map<std::size_t, double> weights;
  bool operator==(const WeightedChoice&) const = default;
};
using ChoiceExpr = std::variant<SingleChoice, ApprovalChoice, WeightedChoice>;

struct VoteRecord {
  std::string proposal_id;
  std::string voter;
  ChoiceExpr choice;
  double vp = 0.0;
  Timestamp timestamp = 0;

  bool operator==(const VoteRecord&) const = default;
};

/// Dense per-option allocation of one ballot. Entries lie in [0,1] and sum
/// to 1 within 1e-9.
struct ChoiceWeights {
  std::vector<double> allocation;

  double operator[](std::size_t option) const { return allocation[option]; }
  std::size_t size() const { return allocation.size(); }
  bool operator==(const ChoiceWeights&) const = default;
};

ChoiceWeights normalize_choice(const ChoiceExpr& expr, std::size_t n_options);

/// Throws kInvalidRecord / kInvalidChoice if the ballot cannot belong to the
/// proposal (negative power, bad index, or a timestamp outside the window).
void validate_vote(const VoteRecord& vote, const Proposal& proposal);

bool in_voting_window(const Proposal& proposal, Timestamp ts);

/// Keeps only the latest ballot per (proposal, voter); earlier ones are
/// dropped and counted. Relative order of the survivors is preserved.
std::vector<VoteRecord> deduplicate_ballots(std::vector<VoteRecord> votes,
                                            Diagnostics* diag = nullptr);

struct ProposalOutcome {
  std::vector<double> per_option_vp;
  double total_vp = 0.0;
  std::size_t n_voters = 0;
  std::size_t final_option = 0;
  bool tie = false;

  bool operator==(const ProposalOutcome&) const = default;
};

/// Sums allocated voting power per option. Ballots are accumulated in a
/// canonical (voter, timestamp) order so the result does not depend on the
/// order of `votes`. Ties go to the lowest index with `tie` set.
/// Throws kEmptyTally on an empty vote list.
ProposalOutcome tally_outcome(const Proposal& proposal,
                              std::span<const VoteRecord> votes);

/// Index of the strict maximum, lowest index on ties.
std::pair<std::size_t, bool> argmax_lowest(std::span<const double> values);

enum class Polarity { kPositive, kNegative, kNeutral };
std::string_view to_string(Polarity polarity);

struct ForumComment {
  Timestamp timestamp = 0;
  Polarity polarity = Polarity::kNeutral;
  bool operator==(const ForumComment&) const = default;
};

struct CommentCounts {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
  std::uint64_t neutral = 0;

  std::uint64_t total() const { return positive + negative + neutral; }
  bool operator==(const CommentCounts&) const = default;
};

struct ForumSignal {
  std::string proposal_id;
  std::string url;
  double stance_score = 0.0;
  double sentiment = 0.0;
  CommentCounts counts;
  std::vector<ForumComment> comments;

  bool operator==(const ForumSignal&) const = default;
};

void validate_forum_signal(const ForumSignal& signal);
CommentCounts count_polarities(std::span<const ForumComment> comments);

/// The proposals under evaluation (P) and, per voter, the proposals they took
/// part in (P_i).
struct EvaluationSet {
  std::vector<std::string> proposals;
  std::map<std::string, std::vector<std::string>> per_voter;
};

EvaluationSet build_evaluation_set(std::span<const std::string> proposal_ids,
                                   std::span<const VoteRecord> votes);

}  // namespace daoeval

#endif  // DAOEVAL_MODEL_HPP_

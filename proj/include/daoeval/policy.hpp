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

// Decision contexts and deterministic baseline policies.
//
// A DecisionContext contains only what an observer could know at the cutoff:
// ballots and forum comments stamped at or before it, and outcomes and
// market windows of earlier proposals whose data had already been observed.

#ifndef DAOEVAL_POLICY_HPP_
#define DAOEVAL_POLICY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/dataset.hpp"
#include "daoeval/dynamics.hpp"
#include "daoeval/market.hpp"
#include "daoeval/model.hpp"

namespace daoeval {

enum class CutoffKind { kExAnte, kExPost, kCustom };
std::string_view to_string(CutoffKind kind);
CutoffKind parse_cutoff_kind(std::string_view text);

struct Cutoff {
  CutoffKind kind = CutoffKind::kExPost;
  Timestamp at = 0;
  bool operator==(const Cutoff&) const = default;
};

/// ex-ante = proposal start, ex-post = proposal end.
Cutoff cutoff_for(const Proposal& proposal, CutoffKind kind);

struct SimilarProposal {
  Proposal proposal;
  double similarity = 0.0;
  std::optional<ProposalOutcome> outcome;
  std::optional<MarketWindow> market;
};

struct DecisionContext {
  Proposal proposal;
  Cutoff cutoff;
  std::vector<VoteRecord> votes_visible;
  std::optional<ForumSignal> forum_visible;
  std::optional<ProposalOutcome> tally_visible;     // absent with no visible votes
  std::optional<DynamicsFeatures> dynamics_visible; // absent with no visible votes
  std::vector<SimilarProposal> similar_proposals;
  std::vector<MarketWindow> market_history;
};

struct ContextOptions {
  std::size_t similar_k = 5;
  int window_days = 3;
  /// space id -> market protocol id; unmapped spaces drop a ".eth" suffix.
  std::map<std::string, std::string> protocol_map;
  /// Protocol id of the market index series used for adjusted returns.
  std::string index_id = "cmc100";
};

std::string protocol_for_space(const std::string& space_id,
                               const std::map<std::string, std::string>& protocol_map);

SeriesBundle series_bundle_for(const DatasetIndex& index, const Proposal& proposal,
                               const ContextOptions& options);

/// Comments after the cutoff are removed. When any were removed the thread
/// scores are recomputed from the visible polarities as (pos - neg) /
/// (pos + neg). Signals without timestamped comments are never visible.
std::optional<ForumSignal> restrict_forum(const ForumSignal& signal, Timestamp cutoff);

/// Jaccard similarity of the lowercased word sets of title and body.
double text_similarity(const Proposal& a, const Proposal& b);

/// Throws kNotFound when the proposal is not in the dataset.
DecisionContext build_decision_context(const DatasetIndex& index,
                                       std::string_view proposal_id, Cutoff cutoff,
                                       const ContextOptions& options = {});
DecisionContext build_decision_context(const DatasetIndex& index,
                                       std::string_view proposal_id, CutoffKind kind,
                                       const ContextOptions& options = {});

/// Latest timestamp of any record in the context, absent when nothing is
/// visible. Never later than the cutoff for a well-formed context.
std::optional<Timestamp> latest_visible_timestamp(const DecisionContext& context);

struct PolicyDecision {
  std::string proposal_id;
  std::size_t selected_option = 0;  // 0-based
  std::string justification;
  std::string policy_id;
  Cutoff cutoff;
  bool fallback = false;  // no signal was available; lowest index chosen

  bool operator==(const PolicyDecision&) const = default;
};

enum class BaselinePolicy { kTokenMajority, kHeadcountMajority, kSentimentSign, kSeededRandom };
std::string_view to_string(BaselinePolicy policy);
std::optional<BaselinePolicy> parse_baseline_policy(std::string_view text);

/// Throws kPolicyInapplicable for sentiment_sign on a multi-option proposal.
PolicyDecision decide_baseline(const DecisionContext& context, BaselinePolicy policy,
                               std::uint64_t seed = 0);

}  // namespace daoeval

#endif  // DAOEVAL_POLICY_HPP_

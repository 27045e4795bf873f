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

// Alignment scoring of policy decisions against realized outcomes.
//
// Per-proposal quantities:
//   S_p = sum_i w_i * alloc_i[final] / T_p      economic majority share
//   A_p = sum_i w_i * alloc_i[ai]    / T_p      token-weighted alignment
//   H_p = sum_i alloc_i[ai] / N_voters          headcount alignment
// where alloc_i is the normalized ballot allocation, so split ballots count
// fractionally. Per-voter benchmarks reduce the same allocations over the
// proposals each voter took part in.

#ifndef DAOEVAL_EVAL_HPP_
#define DAOEVAL_EVAL_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/market.hpp"
#include "daoeval/model.hpp"
#include "daoeval/policy.hpp"

namespace daoeval {

class Diagnostics;

struct ProposalAlignment {
  std::string proposal_id;
  double S = 0.0;
  double A = 0.0;
  double H = 0.0;
  bool ai_equals_final = false;
  ProposalKind kind = ProposalKind::kBinary;
  std::optional<bool> calls_for_change;
  std::size_t final_option = 0;
  std::size_t ai_option = 0;
  bool tie = false;
  std::size_t n_voters = 0;
  double total_vp = 0.0;
  /// Sum over ballots of the allocation on the final option.
  double headcount_final_mass = 0.0;

  bool operator==(const ProposalAlignment&) const = default;
};

/// Throws kInvalidArgument when the decision refers to another proposal or an
/// out-of-range option, kDegenerateTally when T_p = 0.
ProposalAlignment proposal_alignment(const Proposal& proposal, const ProposalOutcome& outcome,
                                     std::span<const VoteRecord> votes,
                                     const PolicyDecision& decision,
                                     std::span<const std::string> abstain_labels =
                                         default_abstain_labels());

/// A proposal with its realized tally, as consumed by the per-voter benchmarks.
struct TalliedProposal {
  const Proposal* proposal = nullptr;
  ProposalOutcome outcome;
  std::span<const VoteRecord> votes;
};

struct VoterBenchmark {
  std::string voter;
  std::size_t n_proposals = 0;
  /// Absent when the voter's total voting power over P_i is zero.
  std::optional<double> tilde_A;
  double hat_A = 0.0;
  /// |P_i| >= min_participation.
  bool eligible = false;

  bool operator==(const VoterBenchmark&) const = default;
};

/// One entry per voter, sorted by voter id.
std::vector<VoterBenchmark> voter_benchmarks(std::span<const TalliedProposal> proposals,
                                             std::size_t min_participation = 5,
                                             Diagnostics* diag = nullptr);

/// Sum with pairwise reduction once the input exceeds 10^4 entries.
double stable_sum(std::span<const double> values);

/// Linear-interpolation quantile of sorted data (q in [0,1]).
double quantile_sorted(std::span<const double> sorted, double q);

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for n = 1
  double q25 = 0.0;
  double q75 = 0.0;
  double max = 0.0;

  bool operator==(const SummaryStats&) const = default;
};

/// Throws kEmptyEvaluation on empty input.
SummaryStats summarize(std::span<const double> values);

struct AlignmentSummary {
  std::size_t n_proposals = 0;
  std::size_t n_ties = 0;
  double p_ai_final = 0.0;
  SummaryStats A;
  SummaryStats H;
  SummaryStats S;
  SummaryStats n_voters;

  std::size_t n_voters_total = 0;
  std::size_t n_voters_eligible = 0;
  std::optional<double> median_tilde_A;
  std::optional<double> median_hat_A;
  std::optional<double> mean_hat_A;
  /// mean A > median tilde_A (strict); absent without eligible voters.
  std::optional<bool> ai_exceeds_token_benchmark;
  /// mean H > median hat_A (strict); absent without eligible voters.
  std::optional<bool> ai_exceeds_headcount_benchmark;

  bool operator==(const AlignmentSummary&) const = default;
};

/// Throws kEmptyEvaluation when `per_proposal` is empty.
AlignmentSummary aggregate_alignment(std::span<const ProposalAlignment> per_proposal,
                                     std::span<const VoterBenchmark> per_voter);

enum class Bucket { kBinaryChange, kBinaryNoChange, kMultiChange, kMultiNoChange, kUnlabeled };
inline constexpr Bucket kAllBuckets[] = {Bucket::kBinaryChange, Bucket::kBinaryNoChange,
                                         Bucket::kMultiChange, Bucket::kMultiNoChange,
                                         Bucket::kUnlabeled};
std::string_view to_string(Bucket bucket);
std::string_view bucket_label(Bucket bucket);
Bucket bucket_of(const ProposalAlignment& alignment);

struct BucketRow {
  Bucket bucket = Bucket::kUnlabeled;
  std::size_t n = 0;
  std::optional<double> human;
  std::optional<double> ai;
  std::optional<double> difference_pp;

  bool operator==(const BucketRow&) const = default;
};

/// Rows in kAllBuckets order. Human agreement is the mean over all ballots in
/// the bucket of the allocation on the final option; AI agreement is the share
/// of proposals where the policy picked the final option.
std::vector<BucketRow> bucket_agreement(std::span<const ProposalAlignment> per_proposal);

struct ConditionalCell {
  std::size_t n = 0;
  std::size_t positive = 0;
  std::optional<double> probability;

  bool operator==(const ConditionalCell&) const = default;
};

struct ExpostRow {
  Bucket bucket = Bucket::kUnlabeled;
  ConditionalCell price_ai;
  ConditionalCell price_final;
  ConditionalCell tvl_ai;
  ConditionalCell tvl_final;

  bool operator==(const ExpostRow&) const = default;
};

enum class PriceMeasure { kPctChange, kAdjReturn };
std::string_view to_string(PriceMeasure measure);
PriceMeasure parse_price_measure(std::string_view text);

/// "Final" cells count every proposal with the metric present; "AI" cells
/// count those where the policy endorsed the adopted outcome. Positive means
/// strictly > 0. Rows in kAllBuckets order followed by an overall row whose
/// bucket is reported as "all".
struct ExpostTable {
  PriceMeasure price_measure = PriceMeasure::kPctChange;
  std::vector<ExpostRow> rows;
  ExpostRow overall;

  bool operator==(const ExpostTable&) const = default;
};

ExpostTable expost_validity(std::span<const ProposalAlignment> per_proposal,
                            std::span<const MarketWindow> windows,
                            PriceMeasure price_measure = PriceMeasure::kPctChange);

struct SubsetStats {
  std::size_t n = 0;
  std::optional<double> p_ai_final;
  std::optional<double> mean_A;
  std::optional<double> mean_H;
  std::optional<double> mean_S;

  bool operator==(const SubsetStats&) const = default;
};

SubsetStats subset_stats(std::span<const ProposalAlignment> per_proposal);

struct ContestedReport {
  double threshold = 0.60;
  SubsetStats all;
  SubsetStats binary;
  SubsetStats multi;
  std::vector<std::string> proposal_ids;

  bool operator==(const ContestedReport&) const = default;
};

/// Keeps proposals with S_p <= threshold.
ContestedReport contested_subset(std::span<const ProposalAlignment> per_proposal,
                                 double threshold = 0.60);

struct TemporalReport {
  SubsetStats ex_ante;
  SubsetStats ex_post;
  std::size_t n = 0;
  std::size_t n_diverging = 0;
  double divergence = 0.0;
  std::vector<std::string> diverging_ids;

  bool operator==(const TemporalReport&) const = default;
};

/// Both inputs must cover the same proposal ids; otherwise throws
/// kCoverageError naming the ids missing on either side.
TemporalReport temporal_comparison(std::span<const ProposalAlignment> ex_ante,
                                   std::span<const ProposalAlignment> ex_post);

/// Copy without tied proposals.
std::vector<ProposalAlignment> without_ties(std::span<const ProposalAlignment> per_proposal);

}  // namespace daoeval

#endif  // DAOEVAL_EVAL_HPP_

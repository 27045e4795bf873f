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

#include "daoeval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"

namespace daoeval {
namespace {

constexpr std::size_t kPairwiseThreshold = 10000;

double pairwise(const double* data, std::size_t n) {
  if (n <= 128) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(data, half) + pairwise(data + half, n - half);
}

double mean_of(std::span<const double> values) {
  return stable_sum(values) / static_cast<double>(values.size());
}

std::optional<double> optional_mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return mean_of(values);
}

std::optional<double> optional_median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

ConditionalCell make_cell(std::size_t n, std::size_t positive) {
  ConditionalCell c;
  c.n = n;
  c.positive = positive;
  if (n > 0) c.probability = static_cast<double>(positive) / static_cast<double>(n);
  return c;
}

}  // namespace

ProposalAlignment proposal_alignment(const Proposal& proposal, const ProposalOutcome& outcome,
                                     std::span<const VoteRecord> votes,
                                     const PolicyDecision& decision,
                                     std::span<const std::string> abstain_labels) {
  const std::size_t n = proposal.choices.size();
  if (decision.proposal_id != proposal.id) {
    throw Error(ErrorCode::kInvalidArgument, "decision for '" + decision.proposal_id +
                                                 "' scored against proposal '" + proposal.id +
                                                 "'");
  }
  if (decision.selected_option >= n || outcome.final_option >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "option index out of range for proposal '" + proposal.id + "'");
  }

  std::vector<std::size_t> order(votes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& va = votes[a];
    const auto& vb = votes[b];
    if (va.voter != vb.voter) return va.voter < vb.voter;
    if (va.timestamp != vb.timestamp) return va.timestamp < vb.timestamp;
    return va.vp < vb.vp;
  });

  // Token and headcount masses per option, accumulated in one pass so that
  // A_p and S_p are bit-identical whenever the policy picks the final option.
  std::vector<double> vp_mass(n, 0.0);
  std::vector<double> head_mass(n, 0.0);
  double total = 0.0;
  std::unordered_set<std::string_view> voters;
  for (auto idx : order) {
    const auto& v = votes[idx];
    if (v.proposal_id != proposal.id) {
      throw Error(ErrorCode::kInvalidRecord, "ballot for '" + v.proposal_id +
                                                 "' scored against proposal '" + proposal.id +
                                                 "'");
    }
    const ChoiceWeights w = normalize_choice(v.choice, n);
    for (std::size_t o = 0; o < n; ++o) {
      if (w[o] != 0.0) {
        vp_mass[o] += v.vp * w[o];
        head_mass[o] += w[o];
      }
    }
    total += v.vp;
    voters.insert(v.voter);
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateTally,
                "proposal '" + proposal.id + "' has zero total voting power");
  }

  ProposalAlignment out;
  out.proposal_id = proposal.id;
  out.final_option = outcome.final_option;
  out.ai_option = decision.selected_option;
  out.tie = outcome.tie;
  out.kind = classify_proposal_kind(proposal, abstain_labels);
  out.calls_for_change = proposal.calls_for_change;
  out.n_voters = voters.size();
  out.total_vp = total;
  out.S = std::clamp(vp_mass[out.final_option] / total, 0.0, 1.0);
  out.A = std::clamp(vp_mass[out.ai_option] / total, 0.0, 1.0);
  out.H = std::clamp(head_mass[out.ai_option] / static_cast<double>(out.n_voters), 0.0, 1.0);
  out.headcount_final_mass = head_mass[out.final_option];
  out.ai_equals_final = out.ai_option == out.final_option;
  return out;
}

std::vector<VoterBenchmark> voter_benchmarks(std::span<const TalliedProposal> proposals,
                                             std::size_t min_participation,
                                             Diagnostics* diag) {
  struct Acc {
    std::size_t n = 0;
    double weight = 0.0;
    double weighted_match = 0.0;
    double match = 0.0;
  };
  std::map<std::string, Acc, std::less<>> acc;
  for (const auto& tp : proposals) {
    const Proposal& p = *tp.proposal;
    const std::size_t n = p.choices.size();
    std::set<std::string_view> seen;
    for (const auto& v : tp.votes) {
      // Ballots are expected deduplicated; a repeat would double-count P_i.
      if (!seen.insert(v.voter).second) continue;
      const double a = normalize_choice(v.choice, n)[tp.outcome.final_option];
      Acc& x = acc[v.voter];
      x.n += 1;
      x.weight += v.vp;
      x.weighted_match += v.vp * a;
      x.match += a;
    }
  }

  std::vector<VoterBenchmark> out;
  out.reserve(acc.size());
  for (const auto& [voter, x] : acc) {
    VoterBenchmark b;
    b.voter = voter;
    b.n_proposals = x.n;
    if (x.weight > 0.0) {
      b.tilde_A = std::clamp(x.weighted_match / x.weight, 0.0, 1.0);
    } else if (diag) {
      diag->Warn(warn::kZeroWeightVoter, voter);
    }
    b.hat_A = std::clamp(x.match / static_cast<double>(x.n), 0.0, 1.0);
    b.eligible = x.n >= min_participation;
    out.push_back(std::move(b));
  }
  return out;
}

double stable_sum(std::span<const double> values) {
  if (values.size() > kPairwiseThreshold) return pairwise(values.data(), values.size());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyEvaluation, "quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyEvaluation, "no values to summarize");
  SummaryStats s;
  s.n = values.size();
  s.mean = mean_of(values);
  if (s.n > 1) {
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - s.mean;
      dev[i] = d * d;
    }
    s.std = std::sqrt(stable_sum(dev) / static_cast<double>(s.n - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = quantile_sorted(sorted, 0.5);
  s.q25 = quantile_sorted(sorted, 0.25);
  s.q75 = quantile_sorted(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

AlignmentSummary aggregate_alignment(std::span<const ProposalAlignment> per_proposal,
                                     std::span<const VoterBenchmark> per_voter) {
  if (per_proposal.empty()) {
    throw Error(ErrorCode::kEmptyEvaluation, "no proposals to aggregate");
  }
  std::vector<double> a, h, s, nv, match;
  AlignmentSummary out;
  for (const auto& p : per_proposal) {
    a.push_back(p.A);
    h.push_back(p.H);
    s.push_back(p.S);
    nv.push_back(static_cast<double>(p.n_voters));
    match.push_back(p.ai_equals_final ? 1.0 : 0.0);
    if (p.tie) ++out.n_ties;
  }
  out.n_proposals = per_proposal.size();
  out.A = summarize(a);
  out.H = summarize(h);
  out.S = summarize(s);
  out.n_voters = summarize(nv);
  out.p_ai_final = mean_of(match);

  std::vector<double> tilde, hat;
  out.n_voters_total = per_voter.size();
  for (const auto& v : per_voter) {
    if (!v.eligible) continue;
    ++out.n_voters_eligible;
    hat.push_back(v.hat_A);
    if (v.tilde_A) tilde.push_back(*v.tilde_A);
  }
  out.median_tilde_A = optional_median(tilde);
  out.median_hat_A = optional_median(hat);
  out.mean_hat_A = optional_mean(hat);
  if (out.median_tilde_A) out.ai_exceeds_token_benchmark = out.A.mean > *out.median_tilde_A;
  if (out.median_hat_A) out.ai_exceeds_headcount_benchmark = out.H.mean > *out.median_hat_A;
  return out;
}

std::string_view to_string(Bucket bucket) {
  switch (bucket) {
    case Bucket::kBinaryChange: return "binary_change_yes";
    case Bucket::kBinaryNoChange: return "binary_change_no";
    case Bucket::kMultiChange: return "multi_change_yes";
    case Bucket::kMultiNoChange: return "multi_change_no";
    case Bucket::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::string_view bucket_label(Bucket bucket) {
  switch (bucket) {
    case Bucket::kBinaryChange: return "Binary (change = yes)";
    case Bucket::kBinaryNoChange: return "Binary (change = no)";
    case Bucket::kMultiChange: return "Multi-option (change = yes)";
    case Bucket::kMultiNoChange: return "Multi-option (change = no)";
    case Bucket::kUnlabeled: return "Unlabeled";
  }
  return "Unlabeled";
}

Bucket bucket_of(const ProposalAlignment& a) {
  if (!a.calls_for_change) return Bucket::kUnlabeled;
  const bool change = *a.calls_for_change;
  if (a.kind == ProposalKind::kBinary) {
    return change ? Bucket::kBinaryChange : Bucket::kBinaryNoChange;
  }
  return change ? Bucket::kMultiChange : Bucket::kMultiNoChange;
}

std::vector<BucketRow> bucket_agreement(std::span<const ProposalAlignment> per_proposal) {
  std::vector<BucketRow> rows;
  for (Bucket b : kAllBuckets) {
    std::vector<double> mass, ballots, ai;
    for (const auto& p : per_proposal) {
      if (bucket_of(p) != b) continue;
      mass.push_back(p.headcount_final_mass);
      ballots.push_back(static_cast<double>(p.n_voters));
      ai.push_back(p.ai_equals_final ? 1.0 : 0.0);
    }
    BucketRow row;
    row.bucket = b;
    row.n = ai.size();
    if (row.n > 0) {
      const double n_ballots = stable_sum(ballots);
      if (n_ballots > 0.0) row.human = stable_sum(mass) / n_ballots;
      row.ai = mean_of(ai);
      if (row.human) row.difference_pp = (*row.ai - *row.human) * 100.0;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string_view to_string(PriceMeasure measure) {
  return measure == PriceMeasure::kAdjReturn ? "adj_return" : "price_pct_change";
}

PriceMeasure parse_price_measure(std::string_view text) {
  if (text == "price_pct_change") return PriceMeasure::kPctChange;
  if (text == "adj_return") return PriceMeasure::kAdjReturn;
  throw Error(ErrorCode::kConfigError, "unknown price measure '" + std::string(text) + "'");
}

ExpostTable expost_validity(std::span<const ProposalAlignment> per_proposal,
                            std::span<const MarketWindow> windows,
                            PriceMeasure price_measure) {
  std::unordered_map<std::string_view, const MarketWindow*> by_id;
  for (const auto& w : windows) by_id.emplace(w.proposal_id, &w);

  struct Counts {
    std::size_t n = 0, pos = 0;
  };
  auto tabulate = [&](auto&& include) {
    Counts pa, pf, ta, tf;
    for (const auto& p : per_proposal) {
      if (!include(p)) continue;
      auto it = by_id.find(p.proposal_id);
      if (it == by_id.end()) continue;
      const MarketWindow& w = *it->second;
      const std::optional<double>& price =
          price_measure == PriceMeasure::kAdjReturn ? w.adj_return : w.price_pct_change;
      if (price) {
        ++pf.n;
        if (*price > 0.0) ++pf.pos;
        if (p.ai_equals_final) {
          ++pa.n;
          if (*price > 0.0) ++pa.pos;
        }
      }
      if (w.tvl_abnormal) {
        ++tf.n;
        if (*w.tvl_abnormal > 0.0) ++tf.pos;
        if (p.ai_equals_final) {
          ++ta.n;
          if (*w.tvl_abnormal > 0.0) ++ta.pos;
        }
      }
    }
    ExpostRow row;
    row.price_ai = make_cell(pa.n, pa.pos);
    row.price_final = make_cell(pf.n, pf.pos);
    row.tvl_ai = make_cell(ta.n, ta.pos);
    row.tvl_final = make_cell(tf.n, tf.pos);
    return row;
  };

  ExpostTable table;
  table.price_measure = price_measure;
  for (Bucket b : kAllBuckets) {
    ExpostRow row = tabulate([&](const ProposalAlignment& p) { return bucket_of(p) == b; });
    row.bucket = b;
    table.rows.push_back(row);
  }
  table.overall = tabulate([](const ProposalAlignment&) { return true; });
  return table;
}

SubsetStats subset_stats(std::span<const ProposalAlignment> per_proposal) {
  SubsetStats s;
  s.n = per_proposal.size();
  if (s.n == 0) return s;
  std::vector<double> m, a, h, sp;
  for (const auto& p : per_proposal) {
    m.push_back(p.ai_equals_final ? 1.0 : 0.0);
    a.push_back(p.A);
    h.push_back(p.H);
    sp.push_back(p.S);
  }
  s.p_ai_final = mean_of(m);
  s.mean_A = mean_of(a);
  s.mean_H = mean_of(h);
  s.mean_S = mean_of(sp);
  return s;
}

ContestedReport contested_subset(std::span<const ProposalAlignment> per_proposal,
                                 double threshold) {
  std::vector<ProposalAlignment> all, binary, multi;
  for (const auto& p : per_proposal) {
    if (!(p.S <= threshold)) continue;
    all.push_back(p);
    (p.kind == ProposalKind::kBinary ? binary : multi).push_back(p);
  }
  ContestedReport r;
  r.threshold = threshold;
  r.all = subset_stats(all);
  r.binary = subset_stats(binary);
  r.multi = subset_stats(multi);
  for (const auto& p : all) r.proposal_ids.push_back(p.proposal_id);
  return r;
}

TemporalReport temporal_comparison(std::span<const ProposalAlignment> ex_ante,
                                   std::span<const ProposalAlignment> ex_post) {
  std::map<std::string_view, const ProposalAlignment*> ante, post;
  for (const auto& p : ex_ante) ante.emplace(p.proposal_id, &p);
  for (const auto& p : ex_post) post.emplace(p.proposal_id, &p);

  std::vector<std::string> missing;
  for (const auto& [id, _] : ante) {
    if (!post.contains(id)) missing.push_back(std::string(id) + " (ex-post)");
  }
  for (const auto& [id, _] : post) {
    if (!ante.contains(id)) missing.push_back(std::string(id) + " (ex-ante)");
  }
  if (!missing.empty()) {
    std::string msg = "ex-ante and ex-post decisions cover different proposals; missing:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorCode::kCoverageError, msg);
  }

  TemporalReport r;
  r.ex_ante = subset_stats(ex_ante);
  r.ex_post = subset_stats(ex_post);
  r.n = ex_post.size();
  for (const auto& p : ex_post) {
    if (ante.at(p.proposal_id)->ai_option != p.ai_option) {
      r.diverging_ids.push_back(p.proposal_id);
    }
  }
  r.n_diverging = r.diverging_ids.size();
  if (r.n > 0) r.divergence = static_cast<double>(r.n_diverging) / static_cast<double>(r.n);
  return r;
}

std::vector<ProposalAlignment> without_ties(std::span<const ProposalAlignment> per_proposal) {
  std::vector<ProposalAlignment> out;
  for (const auto& p : per_proposal) {
    if (!p.tie) out.push_back(p);
  }
  return out;
}

}  // namespace daoeval

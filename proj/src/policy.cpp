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

#include "daoeval/policy.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "daoeval/error.hpp"
#include "daoeval/rng.hpp"

namespace daoeval {
namespace {

std::set<std::string> word_set(const Proposal& p) {
  std::set<std::string> words;
  std::string word;
  auto scan = [&](const std::string& text) {
    for (unsigned char c : text) {
      if (std::isalnum(c)) {
        word += static_cast<char>(std::tolower(c));
      } else if (!word.empty()) {
        words.insert(word);
        word.clear();
      }
    }
    if (!word.empty()) {
      words.insert(word);
      word.clear();
    }
  };
  scan(p.title);
  if (p.body) scan(*p.body);
  return words;
}

std::string option_label(const Proposal& p, std::size_t option) {
  return p.choices.at(option);
}

}  // namespace

std::string_view to_string(CutoffKind kind) {
  switch (kind) {
    case CutoffKind::kExAnte: return "ex-ante";
    case CutoffKind::kExPost: return "ex-post";
    case CutoffKind::kCustom: return "custom";
  }
  return "ex-post";
}

CutoffKind parse_cutoff_kind(std::string_view text) {
  if (text == "ex-ante" || text == "ex_ante") return CutoffKind::kExAnte;
  if (text == "ex-post" || text == "ex_post") return CutoffKind::kExPost;
  if (text == "custom") return CutoffKind::kCustom;
  throw Error(ErrorCode::kInvalidArgument, "unknown cutoff '" + std::string(text) + "'");
}

Cutoff cutoff_for(const Proposal& proposal, CutoffKind kind) {
  switch (kind) {
    case CutoffKind::kExAnte: return {kind, proposal.start};
    case CutoffKind::kExPost: return {kind, proposal.end};
    case CutoffKind::kCustom: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "a custom cutoff needs an explicit timestamp");
}

std::string protocol_for_space(const std::string& space_id,
                               const std::map<std::string, std::string>& protocol_map) {
  if (auto it = protocol_map.find(space_id); it != protocol_map.end()) return it->second;
  constexpr std::string_view kSuffix = ".eth";
  if (space_id.size() > kSuffix.size() && space_id.ends_with(kSuffix)) {
    return space_id.substr(0, space_id.size() - kSuffix.size());
  }
  return space_id;
}

SeriesBundle series_bundle_for(const DatasetIndex& index, const Proposal& proposal,
                               const ContextOptions& options) {
  const std::string protocol = protocol_for_space(proposal.space_id, options.protocol_map);
  SeriesBundle b;
  b.price = index.series(protocol, MarketMetric::kPrice);
  b.tvl = index.series(protocol, MarketMetric::kTvl);
  b.treasury = index.series(protocol, MarketMetric::kTreasury);
  b.index = index.series(options.index_id, MarketMetric::kIndex);
  return b;
}

std::optional<ForumSignal> restrict_forum(const ForumSignal& signal, Timestamp cutoff) {
  if (signal.comments.empty()) return std::nullopt;
  ForumSignal out = signal;
  out.comments.clear();
  for (const auto& c : signal.comments) {
    if (c.timestamp <= cutoff) out.comments.push_back(c);
  }
  if (out.comments.empty()) return std::nullopt;
  out.counts = count_polarities(out.comments);
  if (out.comments.size() != signal.comments.size()) {
    const double decided = static_cast<double>(out.counts.positive + out.counts.negative);
    const double score = decided > 0 ? (static_cast<double>(out.counts.positive) -
                                        static_cast<double>(out.counts.negative)) / decided
                                     : 0.0;
    out.stance_score = score;
    out.sentiment = score;
  }
  return out;
}

double text_similarity(const Proposal& a, const Proposal& b) {
  const auto wa = word_set(a);
  const auto wb = word_set(b);
  if (wa.empty() && wb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& w : wa) common += wb.count(w);
  const std::size_t unite = wa.size() + wb.size() - common;
  return static_cast<double>(common) / static_cast<double>(unite);
}

DecisionContext build_decision_context(const DatasetIndex& index,
                                       std::string_view proposal_id, CutoffKind kind,
                                       const ContextOptions& options) {
  return build_decision_context(index, proposal_id, cutoff_for(index.proposal(proposal_id), kind),
                                options);
}

DecisionContext build_decision_context(const DatasetIndex& index,
                                       std::string_view proposal_id, Cutoff cutoff,
                                       const ContextOptions& options) {
  DecisionContext ctx;
  ctx.proposal = index.proposal(proposal_id);
  ctx.cutoff = cutoff;

  // A ballot cast in the opening second is already part of the tally, so
  // ex-ante contexts see ballots strictly before the start (none, for valid
  // ballots).
  const bool strict = cutoff.kind == CutoffKind::kExAnte;
  for (const auto& v : index.votes_for(proposal_id)) {
    if (v.timestamp < cutoff.at || (!strict && v.timestamp == cutoff.at)) {
      ctx.votes_visible.push_back(v);
    }
  }
  if (!ctx.votes_visible.empty()) {
    ctx.tally_visible = tally_outcome(ctx.proposal, ctx.votes_visible);
    const auto series = build_participation_series(ctx.proposal, ctx.votes_visible);
    ctx.dynamics_visible = compute_dynamics(series, ctx.tally_visible->final_option);
  }
  if (const ForumSignal* f = index.forum_for(proposal_id)) {
    ctx.forum_visible = restrict_forum(*f, cutoff.at);
  }

  struct Candidate {
    const Proposal* p;
    double score;
  };
  std::vector<Candidate> candidates;
  for (const auto& p : index.dataset().proposals) {
    if (p.id == ctx.proposal.id || p.space_id != ctx.proposal.space_id) continue;
    if (p.end > cutoff.at) continue;
    if (ctx.proposal.category && p.category != ctx.proposal.category) continue;
    candidates.push_back({&p, text_similarity(ctx.proposal, p)});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.p->end != b.p->end) return a.p->end > b.p->end;
    return a.p->id < b.p->id;
  });
  if (candidates.size() > options.similar_k) candidates.resize(options.similar_k);
  for (const auto& c : candidates) {
    SimilarProposal sp;
    sp.proposal = *c.p;
    sp.similarity = c.score;
    const auto votes = index.votes_for(c.p->id);
    if (!votes.empty()) sp.outcome = tally_outcome(*c.p, votes);
    MarketWindow w = compute_market_window(*c.p, series_bundle_for(index, *c.p, options),
                                           options.window_days);
    if (market_window_available_at(w) <= cutoff.at) {
      ctx.market_history.push_back(w);
      sp.market = std::move(w);
    }
    ctx.similar_proposals.push_back(std::move(sp));
  }
  return ctx;
}

std::optional<Timestamp> latest_visible_timestamp(const DecisionContext& ctx) {
  std::optional<Timestamp> latest;
  auto see = [&](Timestamp t) {
    if (!latest || t > *latest) latest = t;
  };
  for (const auto& v : ctx.votes_visible) see(v.timestamp);
  if (ctx.forum_visible) {
    for (const auto& c : ctx.forum_visible->comments) see(c.timestamp);
  }
  for (const auto& s : ctx.similar_proposals) see(s.proposal.end);
  for (const auto& w : ctx.market_history) see(market_window_available_at(w));
  return latest;
}

std::string_view to_string(BaselinePolicy policy) {
  switch (policy) {
    case BaselinePolicy::kTokenMajority: return "token_majority";
    case BaselinePolicy::kHeadcountMajority: return "headcount_majority";
    case BaselinePolicy::kSentimentSign: return "sentiment_sign";
    case BaselinePolicy::kSeededRandom: return "seeded_random";
  }
  return "token_majority";
}

std::optional<BaselinePolicy> parse_baseline_policy(std::string_view text) {
  for (auto p : {BaselinePolicy::kTokenMajority, BaselinePolicy::kHeadcountMajority,
                 BaselinePolicy::kSentimentSign, BaselinePolicy::kSeededRandom}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

PolicyDecision decide_baseline(const DecisionContext& ctx, BaselinePolicy policy,
                               std::uint64_t seed) {
  const Proposal& p = ctx.proposal;
  PolicyDecision d;
  d.proposal_id = p.id;
  d.policy_id = std::string(to_string(policy));
  d.cutoff = ctx.cutoff;

  switch (policy) {
    case BaselinePolicy::kTokenMajority: {
      if (!ctx.tally_visible) {
        d.selected_option = 0;
        d.fallback = true;
        d.justification = "No ballots visible at the cutoff; defaulting to the first option.";
        break;
      }
      d.selected_option = ctx.tally_visible->final_option;
      d.justification = "Option '" + option_label(p, d.selected_option) +
                        "' holds the largest share of visible voting power.";
      break;
    }
    case BaselinePolicy::kHeadcountMajority: {
      if (ctx.votes_visible.empty()) {
        d.selected_option = 0;
        d.fallback = true;
        d.justification = "No ballots visible at the cutoff; defaulting to the first option.";
        break;
      }
      std::vector<double> counts(p.choices.size(), 0.0);
      for (const auto& v : ctx.votes_visible) {
        const auto w = normalize_choice(v.choice, p.choices.size());
        for (std::size_t o = 0; o < counts.size(); ++o) counts[o] += w[o];
      }
      d.selected_option = argmax_lowest(counts).first;
      d.justification = "Option '" + option_label(p, d.selected_option) +
                        "' has the most visible ballots.";
      break;
    }
    case BaselinePolicy::kSentimentSign: {
      if (classify_proposal_kind(p) != ProposalKind::kBinary) {
        throw Error(ErrorCode::kPolicyInapplicable,
                    "sentiment_sign applies to binary proposals only ('" + p.id + "')");
      }
      std::vector<std::size_t> substantive;
      for (std::size_t o = 0; o < p.choices.size(); ++o) {
        if (!is_abstain_label(p.choices[o])) substantive.push_back(o);
      }
      const double sentiment = ctx.forum_visible ? ctx.forum_visible->sentiment : 0.0;
      d.fallback = !ctx.forum_visible;
      d.selected_option = sentiment > 0.0 ? substantive[0] : substantive[1];
      d.justification = ctx.forum_visible
                            ? "Visible forum sentiment is " +
                                  std::string(sentiment > 0.0 ? "positive" : "not positive") +
                                  "; selecting '" + option_label(p, d.selected_option) + "'."
                            : "No forum signal visible; selecting '" +
                                  option_label(p, d.selected_option) + "'.";
      break;
    }
    case BaselinePolicy::kSeededRandom: {
      Rng rng(seed ^ fnv1a64(p.id));
      d.selected_option = static_cast<std::size_t>(rng.below(p.choices.size()));
      d.justification = "Uniform draw with seed " + std::to_string(seed) + ".";
      break;
    }
  }
  return d;
}

}  // namespace daoeval

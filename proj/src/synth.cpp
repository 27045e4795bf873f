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

#include "daoeval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "daoeval/dynamics.hpp"
#include "daoeval/error.hpp"
#include "daoeval/policy.hpp"
#include "daoeval/rng.hpp"

namespace daoeval {
namespace {

constexpr double kContestedCeiling = 0.60;
constexpr int kContestedAttempts = 32;

const char* const kTopics[] = {"Gauge Management",     "Funding Proposals",
                               "Token Integration",    "Incentive Program",
                               "Stablecoin Integration", "Risk Management",
                               "Governance Process",   "Treasury Management",
                               "Protocol Upgrade",     "Partnership"};

const char* const kTopicWords[][4] = {
    {"gauge", "weights", "liquidity", "pool"},
    {"grant", "budget", "funding", "contributors"},
    {"token", "collateral", "listing", "whitelist"},
    {"incentives", "rewards", "emissions", "program"},
    {"stablecoin", "peg", "onboarding", "minting"},
    {"risk", "parameters", "liquidation", "threshold"},
    {"governance", "quorum", "delegation", "process"},
    {"treasury", "diversification", "reserves", "allocation"},
    {"upgrade", "contract", "deployment", "migration"},
    {"partnership", "integration", "collaboration", "ecosystem"},
};

const char* const kActions[] = {"Adjust", "Approve", "Introduce", "Extend", "Revise", "Fund"};

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string voter_id(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "0x%040zx", i + 1);
  return buf;
}

std::string proposal_id(std::uint64_t seed, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "0xsyn%08llx%06zu",
                static_cast<unsigned long long>(seed & 0xffffffffULL), i);
  return buf;
}

std::vector<std::string> make_choices(Rng& rng, std::size_t n) {
  if (n == 2) return {"For", "Against"};
  if (n == 3 && rng.chance(0.5)) return {"For", "Against", "Abstain"};
  std::vector<std::string> out;
  for (std::size_t o = 0; o < n; ++o) out.push_back("Option " + std::to_string(o + 1));
  return out;
}

/// Indices of non-abstain options.
std::vector<std::size_t> substantive_options(const std::vector<std::string>& choices) {
  std::vector<std::size_t> out;
  for (std::size_t o = 0; o < choices.size(); ++o) {
    if (!is_abstain_label(choices[o])) out.push_back(o);
  }
  return out;
}

std::size_t other_option(Rng& rng, std::size_t n, std::size_t not_this) {
  std::size_t o = rng.below(n - 1);
  return o >= not_this ? o + 1 : o;
}

Timestamp arrival_time(Rng& rng, ArrivalPattern pattern, Timestamp start, Timestamp end) {
  const double span = static_cast<double>(end - start);
  double frac = 0.0;
  switch (pattern) {
    case ArrivalPattern::kUniform:
    case ArrivalPattern::kLateSpike:
      frac = rng.uniform();
      break;
    case ArrivalPattern::kEarlyRush: {
      const double u = rng.uniform();
      frac = u * u * u;
      break;
    }
    case ArrivalPattern::kStairwise: {
      // Five bursts with a few minutes of jitter each.
      const double step = 0.1 + 0.2 * static_cast<double>(rng.below(5));
      frac = step + rng.uniform(-0.01, 0.01);
      break;
    }
  }
  const auto ts = start + static_cast<Timestamp>(std::floor(frac * span));
  return std::clamp(ts, start, end);
}

ChoiceExpr make_ballot(Rng& rng, const ScenarioSpec& spec, std::size_t n, std::size_t pref) {
  const double r = rng.uniform();
  const auto& mix = spec.ballot_mix;
  if (r < mix.single || (mix.approval == 0.0 && mix.weighted == 0.0)) {
    return SingleChoice{pref + 1};
  }
  if (r < mix.single + mix.approval) {
    ApprovalChoice a{{pref + 1}};
    if (rng.chance(0.5)) a.options.push_back(other_option(rng, n, pref) + 1);
    std::sort(a.options.begin(), a.options.end());
    return a;
  }
  WeightedChoice w;
  w.weights[pref + 1] = static_cast<double>(rng.between(5, 10));
  const std::size_t other = other_option(rng, n, pref);
  const auto extra = rng.between(0, 4);
  if (extra > 0) w.weights[other + 1] = static_cast<double>(extra);
  return w;
}

struct Ballot {
  std::size_t voter = 0;
  double vp = 0.0;
  Timestamp ts = 0;
  ChoiceExpr choice;
};

/// Splits the participants between `winner` and `runner_up` largest holder
/// first, always topping up the lighter side, then names the heavier side
/// the winner. Returns false when the result is not contested enough.
bool balance_contested(std::vector<Ballot>& ballots, std::size_t winner, std::size_t runner_up) {
  std::vector<std::size_t> order(ballots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ballots[a].vp > ballots[b].vp; });
  double mass[2] = {0.0, 0.0};
  std::vector<int> side(ballots.size(), 0);
  for (auto i : order) {
    const int s = mass[0] <= mass[1] ? 0 : 1;
    side[i] = s;
    mass[s] += ballots[i].vp;
  }
  if (mass[0] == mass[1]) return false;
  const int heavy = mass[0] > mass[1] ? 0 : 1;
  const double total = mass[0] + mass[1];
  if (!(mass[heavy] / total <= kContestedCeiling)) return false;
  for (std::size_t i = 0; i < ballots.size(); ++i) {
    ballots[i].choice = SingleChoice{(side[i] == heavy ? winner : runner_up) + 1};
  }
  return true;
}

void write_series(Dataset& ds, const std::string& protocol, MarketMetric metric, Day first,
                  Day last, double start_value, double step, double gap_rate, Rng& rng) {
  MarketSeries s;
  s.protocol = protocol;
  s.metric = metric;
  double v = start_value;
  for (Day d = first; d <= last; ++d) {
    v *= 1.0 + rng.uniform(-step, step);
    const bool gap = gap_rate > 0.0 && rng.chance(gap_rate);
    if (!gap) s.samples.push_back({d, round_to(v, 1e-6)});
  }
  ds.market.push_back(std::move(s));
}

}  // namespace

std::string_view to_string(VpDistribution d) {
  return d == VpDistribution::kPareto ? "pareto" : "uniform";
}

std::string_view to_string(ArrivalPattern p) {
  switch (p) {
    case ArrivalPattern::kUniform: return "uniform";
    case ArrivalPattern::kEarlyRush: return "early_rush";
    case ArrivalPattern::kLateSpike: return "late_spike";
    case ArrivalPattern::kStairwise: return "stairwise";
  }
  return "uniform";
}

ArrivalPattern parse_arrival_pattern(std::string_view text) {
  for (auto p : {ArrivalPattern::kUniform, ArrivalPattern::kEarlyRush, ArrivalPattern::kLateSpike,
                 ArrivalPattern::kStairwise}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorCode::kSpecError, "unknown arrival pattern '" + std::string(text) + "'");
}

void validate_scenario(const ScenarioSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kSpecError, why); };
  auto fraction = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0,1]");
  };
  if (spec.n_proposals == 0) fail("n_proposals must be positive");
  if (spec.min_options < 2) fail("proposals need at least two options");
  if (spec.max_options < spec.min_options) fail("max_options below min_options");
  if (spec.voters == 0) fail("voters must be positive");
  if (!(spec.participation > 0.0 && spec.participation <= 1.0)) {
    fail("participation must lie in (0,1]");
  }
  fraction(spec.contested_fraction, "contested_fraction");
  fraction(spec.ballot_mix.single, "ballot_mix.single");
  fraction(spec.ballot_mix.approval, "ballot_mix.approval");
  fraction(spec.ballot_mix.weighted, "ballot_mix.weighted");
  fraction(spec.labeled_fraction, "labeled_fraction");
  fraction(spec.market_gap_rate, "market_gap_rate");
  const double mix = spec.ballot_mix.single + spec.ballot_mix.approval + spec.ballot_mix.weighted;
  if (std::abs(mix - 1.0) > 1e-9) fail("ballot_mix fractions must sum to 1");
  if (spec.vp_distribution == VpDistribution::kPareto && !(spec.pareto_alpha > 0.0)) {
    fail("pareto_alpha must be positive");
  }
  if (spec.contested_fraction > 0.0 && spec.voters < 2) {
    fail("contested proposals need at least two voters");
  }
  if (spec.spaces.empty()) fail("at least one space is required");
  if (spec.duration_days <= 0 || spec.spacing_days < 0) fail("invalid proposal timing");
}

ScenarioSpec scenario_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kSpecError, "scenario must be a JSON object");
  ScenarioSpec s;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else if (key == "n_proposals") {
        s.n_proposals = v.get<std::size_t>();
      } else if (key == "options") {
        if (v.is_array()) {
          if (v.size() != 2) throw Error(ErrorCode::kSpecError, "options range needs two values");
          s.min_options = v[0].get<std::size_t>();
          s.max_options = v[1].get<std::size_t>();
        } else {
          s.min_options = s.max_options = v.get<std::size_t>();
        }
      } else if (key == "voters") {
        s.voters = v.get<std::size_t>();
      } else if (key == "participation") {
        s.participation = v.get<double>();
      } else if (key == "vp_distribution") {
        if (v.is_string()) {
          const auto name = v.get<std::string>();
          if (name == "uniform") {
            s.vp_distribution = VpDistribution::kUniform;
          } else if (name == "pareto") {
            s.vp_distribution = VpDistribution::kPareto;
          } else {
            throw Error(ErrorCode::kSpecError, "unknown vp_distribution '" + name + "'");
          }
        } else {
          const auto name = v.at("kind").get<std::string>();
          if (name != "pareto" && name != "uniform") {
            throw Error(ErrorCode::kSpecError, "unknown vp_distribution '" + name + "'");
          }
          s.vp_distribution = name == "pareto" ? VpDistribution::kPareto : VpDistribution::kUniform;
          if (v.contains("alpha")) s.pareto_alpha = v["alpha"].get<double>();
        }
      } else if (key == "arrival") {
        s.arrival = parse_arrival_pattern(v.get<std::string>());
      } else if (key == "contested_fraction") {
        s.contested_fraction = v.get<double>();
      } else if (key == "ballot_mix") {
        s.ballot_mix.single = v.value("single", 0.0);
        s.ballot_mix.approval = v.value("approval", 0.0);
        s.ballot_mix.weighted = v.value("weighted", 0.0);
      } else if (key == "spaces") {
        s.spaces = v.get<std::vector<std::string>>();
      } else if (key == "first_start") {
        s.first_start = timestamp_from_json(v);
      } else if (key == "duration_days") {
        s.duration_days = v.get<int>();
      } else if (key == "spacing_days") {
        s.spacing_days = v.get<int>();
      } else if (key == "labeled_fraction") {
        s.labeled_fraction = v.get<double>();
      } else if (key == "forum") {
        s.forum = v.get<bool>();
      } else if (key == "market") {
        s.market = v.get<bool>();
      } else if (key == "index_protocol") {
        s.index_protocol = v.get<std::string>();
      } else if (key == "market_gap_rate") {
        s.market_gap_rate = v.get<double>();
      } else {
        throw Error(ErrorCode::kSpecError, "unknown scenario key '" + key + "'");
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSpecError, std::string("malformed scenario: ") + e.what());
  }
  validate_scenario(s);
  return s;
}

Json to_json(const ScenarioSpec& s) {
  Json j;
  j["seed"] = s.seed;
  j["n_proposals"] = s.n_proposals;
  j["options"] = Json::array({s.min_options, s.max_options});
  j["voters"] = s.voters;
  j["participation"] = s.participation;
  j["vp_distribution"] = Json{{"kind", to_string(s.vp_distribution)}, {"alpha", s.pareto_alpha}};
  j["arrival"] = to_string(s.arrival);
  j["contested_fraction"] = s.contested_fraction;
  j["ballot_mix"] = Json{{"single", s.ballot_mix.single},
                         {"approval", s.ballot_mix.approval},
                         {"weighted", s.ballot_mix.weighted}};
  j["spaces"] = s.spaces;
  j["first_start"] = format_iso8601(s.first_start);
  j["duration_days"] = s.duration_days;
  j["spacing_days"] = s.spacing_days;
  j["labeled_fraction"] = s.labeled_fraction;
  j["forum"] = s.forum;
  j["market"] = s.market;
  j["index_protocol"] = s.index_protocol;
  j["market_gap_rate"] = s.market_gap_rate;
  return j;
}

SyntheticDataset generate_dataset(const ScenarioSpec& spec) {
  validate_scenario(spec);
  Rng rng(spec.seed);
  SyntheticDataset out;
  Dataset& ds = out.dataset;

  // Voter population with a fixed base voting power each.
  std::vector<double> base_vp(spec.voters);
  for (auto& vp : base_vp) {
    const double raw = spec.vp_distribution == VpDistribution::kPareto
                           ? 10.0 * rng.pareto(spec.pareto_alpha)
                           : rng.uniform(1.0, 1000.0);
    vp = std::max(round_to(raw, 1e-4), 1e-4);
  }

  // Exactly round(fraction * n) contested proposals, chosen by a seeded shuffle.
  std::vector<bool> contested(spec.n_proposals, false);
  {
    const auto k = static_cast<std::size_t>(
        std::llround(spec.contested_fraction * static_cast<double>(spec.n_proposals)));
    std::vector<std::size_t> idx(spec.n_proposals);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(idx.size() - i);
      std::swap(idx[i], idx[j]);
      contested[idx[i]] = true;
    }
  }

  for (std::size_t pi = 0; pi < spec.n_proposals; ++pi) {
    Proposal p;
    p.id = proposal_id(spec.seed, pi);
    p.space_id = spec.spaces[pi % spec.spaces.size()];
    const std::size_t n_options =
        spec.min_options + rng.below(spec.max_options - spec.min_options + 1);
    p.choices = make_choices(rng, n_options);
    const std::size_t topic = rng.below(std::size(kTopics));
    const char* const* words = kTopicWords[topic];
    p.title = std::string(kActions[rng.below(std::size(kActions))]) + " " + words[0] + " " +
              words[1] + " for " + words[2 + rng.below(2)];
    p.body = "This proposal concerns " + std::string(words[0]) + " " + words[1] +
             ". It would change the " + words[2] + " " + words[3] + " of the protocol.";
    p.category = kTopics[topic];
    p.start = spec.first_start + static_cast<Timestamp>(pi) * spec.spacing_days * kSecondsPerDay +
              static_cast<Timestamp>(rng.below(12)) * 3600;
    p.end = p.start + static_cast<Timestamp>(spec.duration_days) * kSecondsPerDay;
    p.created_at = p.start - kSecondsPerDay;
    if (rng.chance(spec.labeled_fraction)) p.calls_for_change = rng.chance(0.75);

    const auto substantive = substantive_options(p.choices);
    const std::size_t winner = substantive[rng.below(substantive.size())];
    std::size_t runner_up = winner;
    while (runner_up == winner) runner_up = substantive[rng.below(substantive.size())];

    const std::size_t min_participants = contested[pi] ? 2 : 1;
    std::vector<Ballot> ballots;
    bool balanced = !contested[pi];
    for (int attempt = 0; attempt < (contested[pi] ? kContestedAttempts : 1); ++attempt) {
      ballots.clear();
      for (std::size_t v = 0; v < spec.voters; ++v) {
        if (rng.chance(spec.participation)) ballots.push_back({v, base_vp[v], 0, SingleChoice{}});
      }
      while (ballots.size() < std::min(min_participants, spec.voters)) {
        const std::size_t v = rng.below(spec.voters);
        if (std::none_of(ballots.begin(), ballots.end(),
                         [&](const Ballot& b) { return b.voter == v; })) {
          ballots.push_back({v, base_vp[v], 0, SingleChoice{}});
        }
      }
      std::sort(ballots.begin(), ballots.end(),
                [](const Ballot& a, const Ballot& b) { return a.voter < b.voter; });

      if (spec.arrival == ArrivalPattern::kLateSpike) {
        // One whale, well above everyone else, arriving in the last quartile.
        auto whale = std::max_element(ballots.begin(), ballots.end(),
                                      [](const Ballot& a, const Ballot& b) { return a.vp < b.vp; });
        whale->vp = round_to(whale->vp * 5.0, 1e-4);
      }
      for (auto& b : ballots) b.ts = arrival_time(rng, spec.arrival, p.start, p.end);
      if (spec.arrival == ArrivalPattern::kLateSpike) {
        auto whale = std::max_element(ballots.begin(), ballots.end(),
                                      [](const Ballot& a, const Ballot& b) { return a.vp < b.vp; });
        const Timestamp q4 = p.start + (3 * (p.end - p.start) + 3) / 4;
        whale->ts = q4 + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(p.end - q4) + 1));
      }

      if (contested[pi]) {
        if (balance_contested(ballots, winner, runner_up)) {
          balanced = true;
          break;
        }
      } else {
        for (auto& b : ballots) {
          const std::size_t pref =
              rng.chance(0.8) ? winner : other_option(rng, p.choices.size(), winner);
          b.choice = make_ballot(rng, spec, p.choices.size(), pref);
        }
      }
    }
    if (!balanced) {
      // A single holder dominates every draw: split each ballot 55/45.
      for (auto& b : ballots) {
        b.choice = WeightedChoice{{{winner + 1, 55.0}, {runner_up + 1, 45.0}}};
      }
    }

    std::sort(ballots.begin(), ballots.end(), [](const Ballot& a, const Ballot& b) {
      return a.ts != b.ts ? a.ts < b.ts : a.voter < b.voter;
    });

    ProposalTruth truth;
    truth.proposal_id = p.id;
    truth.intended_winner = winner;
    truth.contested = contested[pi];
    truth.arrival = spec.arrival;
    const Ballot* spike = nullptr;
    for (const auto& b : ballots) {
      if (!spike || b.vp > spike->vp) spike = &b;
    }
    truth.spike_voter = voter_id(spike->voter);
    truth.spike_timestamp = spike->ts;
    truth.spike_quartile = static_cast<int>(quartile_of(p.start, p.end, spike->ts));
    out.truth.push_back(truth);

    for (const auto& b : ballots) {
      ds.votes.push_back(VoteRecord{p.id, voter_id(b.voter), b.choice, b.vp, b.ts});
    }

    if (spec.forum) {
      ForumSignal f;
      f.proposal_id = p.id;
      f.url = "https://forum.synth.example/t/" + p.id;
      const std::size_t n_comments = 3 + rng.below(10);
      const bool favourable = p.choices[winner] == "For";
      const Timestamp from = *p.created_at;
      const Timestamp to = p.end + 2 * kSecondsPerDay;
      for (std::size_t c = 0; c < n_comments; ++c) {
        ForumComment cm;
        cm.timestamp = from + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(to - from)));
        const double r = rng.uniform();
        if (r < 0.25) {
          cm.polarity = Polarity::kNeutral;
        } else if (r < 0.8) {
          cm.polarity = favourable ? Polarity::kPositive : Polarity::kNegative;
        } else {
          cm.polarity = favourable ? Polarity::kNegative : Polarity::kPositive;
        }
        f.comments.push_back(cm);
      }
      std::sort(f.comments.begin(), f.comments.end(),
                [](const ForumComment& a, const ForumComment& b) {
                  return a.timestamp < b.timestamp;
                });
      f.counts = count_polarities(f.comments);
      const double pos = static_cast<double>(f.counts.positive);
      const double neg = static_cast<double>(f.counts.negative);
      f.stance_score = pos + neg > 0 ? (pos - neg) / (pos + neg) : 0.0;
      f.sentiment = round_to(std::clamp(f.stance_score * 0.8 + rng.uniform(-0.1, 0.1), -1.0, 1.0),
                             1e-6);
      ds.forum.push_back(std::move(f));
    }
    ds.proposals.push_back(std::move(p));
  }

  if (spec.market) {
    const Day first = day_of(ds.proposals.front().start) - 10;
    const Day last = day_of(ds.proposals.back().end) + 10;
    std::vector<std::string> protocols;
    for (const auto& space : spec.spaces) {
      const std::string proto = protocol_for_space(space, {});
      if (std::find(protocols.begin(), protocols.end(), proto) == protocols.end()) {
        protocols.push_back(proto);
      }
    }
    for (const auto& proto : protocols) {
      write_series(ds, proto, MarketMetric::kPrice, first, last, 2.0, 0.05, spec.market_gap_rate,
                   rng);
      write_series(ds, proto, MarketMetric::kTvl, first, last, 5.0e7, 0.03, spec.market_gap_rate,
                   rng);
      write_series(ds, proto, MarketMetric::kTreasury, first, last, 1.0e7, 0.02,
                   spec.market_gap_rate, rng);
    }
    write_series(ds, spec.index_protocol, MarketMetric::kIndex, first, last, 150.0, 0.02,
                 spec.market_gap_rate, rng);
  }
  return out;
}

Json sidecar_to_json(const ScenarioSpec& spec, const std::vector<ProposalTruth>& truth) {
  Json j;
  j["scenario"] = to_json(spec);
  Json list = Json::array();
  for (const auto& t : truth) {
    list.push_back(Json{{"proposal_id", t.proposal_id},
                        {"intended_winner", t.intended_winner + 1},
                        {"contested", t.contested},
                        {"arrival", to_string(t.arrival)},
                        {"spike_voter", t.spike_voter},
                        {"spike_timestamp", t.spike_timestamp},
                        {"spike_quartile", t.spike_quartile + 1}});
  }
  j["proposals"] = std::move(list);
  return j;
}

}  // namespace daoeval

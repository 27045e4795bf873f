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

#include "equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "daoeval/dynamics.hpp"
#include "daoeval/error.hpp"
#include "daoeval/eval.hpp"
#include "daoeval/market.hpp"
#include "daoeval/policy.hpp"
#include "oracle.hpp"

namespace oracle {

void Comparison::near(const std::string& what, long double got, long double want,
                      long double rel) {
  ++checks;
  const long double scale = std::max(std::fabs(got), std::fabs(want));
  if (std::isnan(static_cast<double>(got)) || std::fabs(got - want) > rel * scale + 1e-12L) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": got " << static_cast<double>(got) << ", want "
       << static_cast<double>(want);
    mismatches.push_back(os.str());
  }
}

void Comparison::equal(const std::string& what, bool same, const std::string& detail) {
  ++checks;
  if (!same) mismatches.push_back(what + (detail.empty() ? "" : ": " + detail));
}

namespace {

using daoeval::Dataset;
using daoeval::MarketMetric;
using daoeval::MarketSeries;

const MarketSeries* find_series(const Dataset& d, const std::string& protocol, MarketMetric m) {
  for (const auto& s : d.market) {
    if (s.protocol == protocol && s.metric == m) return &s;
  }
  return nullptr;
}

std::string protocol_of(const std::string& space) {
  const std::string suffix = ".eth";
  if (space.size() > suffix.size() && space.ends_with(suffix)) {
    return space.substr(0, space.size() - suffix.size());
  }
  return space;
}

std::vector<VoteRecord> votes_of(const Dataset& d, const std::string& id) {
  std::vector<VoteRecord> out;
  for (const auto& v : d.votes) {
    if (v.proposal_id == id) out.push_back(v);
  }
  return out;
}

void compare_stats(Comparison& c, const std::string& what, const daoeval::SummaryStats& got,
                   const std::vector<long double>& values) {
  const Stats want = stats(values);
  c.equal(what + ".n", got.n == values.size());
  c.near(what + ".mean", got.mean, want.mean);
  c.near(what + ".median", got.median, want.median);
  c.near(what + ".std", got.std, want.std);
  c.near(what + ".q25", got.q25, want.q25);
  c.near(what + ".q75", got.q75, want.q75);
  c.near(what + ".max", got.max, want.max);
}

void compare_subset(Comparison& c, const std::string& what, const daoeval::SubsetStats& got,
                    const Subset& want) {
  c.equal(what + ".n", got.n == want.n,
          std::to_string(got.n) + " vs " + std::to_string(want.n));
  if (want.n == 0) {
    c.equal(what + " empty", !got.mean_A && !got.p_ai_final);
    return;
  }
  if (!got.p_ai_final || !got.mean_A || !got.mean_H || !got.mean_S) {
    c.equal(what + " present", false);
    return;
  }
  c.near(what + ".p", *got.p_ai_final, want.p);
  c.near(what + ".A", *got.mean_A, want.A);
  c.near(what + ".H", *got.mean_H, want.H);
  c.near(what + ".S", *got.mean_S, want.S);
}

// Builds oracle rows for the evaluated proposals given per-proposal AI picks.
struct OracleEval {
  std::vector<Row> rows;
  std::vector<std::size_t> winners;
  std::vector<const Proposal*> proposals;
  std::vector<std::vector<VoteRecord>> votes;
};

OracleEval oracle_eval(const Dataset& d, const std::vector<std::string>& ids,
                       const std::map<std::string, std::size_t>& ai,
                       const std::map<std::string, std::size_t>& fallback_winner) {
  OracleEval e;
  for (const auto& id : ids) {
    const Proposal* p = nullptr;
    for (const auto& q : d.proposals) {
      if (q.id == id) p = &q;
    }
    auto vs = votes_of(d, id);
    const Tally t = tally(*p, vs);
    // On a near-tie the realized winner is decided by rounding; take the
    // library's pick among the tied options so the rest stays comparable.
    const std::size_t w = t.tie ? fallback_winner.at(id) : t.winner;
    const Alignment a = alignment(*p, vs, w, ai.at(id));
    Row r;
    r.id = id;
    r.S = a.S;
    r.A = a.A;
    r.H = a.H;
    r.final_mass = a.final_mass;
    r.voters = t.voters;
    r.agree = ai.at(id) == w;
    r.binary = is_binary(*p);
    r.change = p->calls_for_change;
    r.tie = t.tie;
    e.rows.push_back(r);
    e.winners.push_back(w);
    e.proposals.push_back(p);
    e.votes.push_back(std::move(vs));
  }
  return e;
}

}  // namespace

Comparison compare_dataset(const Dataset& d, std::uint64_t seed, double threshold,
                           std::size_t min_participation) {
  Comparison c;
  const daoeval::DatasetIndex index(d);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::string> ids;
  std::map<std::string, std::size_t> ai_pick, lib_winner, ante_pick;
  std::vector<daoeval::ProposalAlignment> lib_rows, lib_ante;
  std::vector<daoeval::TalliedProposal> tallied;
  std::vector<daoeval::MarketWindow> lib_windows;
  std::vector<std::optional<long double>> o_price, o_tvl;

  for (std::size_t pi = 0; pi < d.proposals.size(); ++pi) {
    const Proposal& p = d.proposals[pi];
    const auto lib_votes = index.votes_for(p.id);
    const auto o_votes = votes_of(d, p.id);
    const std::string tag = "proposal " + p.id;
    c.equal(tag + " vote count", lib_votes.size() == o_votes.size());

    // ---- temporal features (independent of the evaluation set) ----
    const auto series = daoeval::build_participation_series(p, lib_votes);
    const auto ev = events(p, o_votes);
    c.equal(tag + " events", series.events.size() == ev.size());
    for (std::size_t i = 0; i < std::min(ev.size(), series.events.size()); ++i) {
      if (series.events[i].timestamp != ev[i].ts || series.events[i].voter != ev[i].voter ||
          static_cast<int>(series.events[i].quartile) != ev[i].quartile) {
        c.equal(tag + " event order/quartile at " + std::to_string(i), false);
        break;
      }
    }
    for (int q = 0; q < 4; ++q) {
      long double vp = 0, n = 0;
      for (const auto& e : ev) {
        if (e.quartile == q) {
          vp += e.vp;
          n += 1;
        }
      }
      c.near(tag + " quartile vp " + std::to_string(q), series.meta.per_quartile_vp[q], vp);
      c.near(tag + " quartile votes " + std::to_string(q),
             static_cast<long double>(series.meta.per_quartile_votes[q]), n);
    }
    const Lead lead_want = lead(p, ev);
    const auto lead_got = daoeval::lead_metrics(series);
    for (std::size_t o = 0; o < p.choices.size(); ++o) {
      const std::string opt = " option " + std::to_string(o);
      c.near(tag + " lead_total" + opt, lead_got.total[o], lead_want.total[o]);
      c.near(tag + " early" + opt, lead_got.early[o], lead_want.early[o]);
      for (int q = 0; q < 4; ++q) {
        c.near(tag + " lead_q" + std::to_string(q) + opt, lead_got.by_quartile[q][o],
               lead_want.by_quartile[q][o]);
      }
    }
    c.near(tag + " half_slope_diff", daoeval::half_slope_diff(series), half_slope(p, ev));

    if (o_votes.empty()) continue;  // nothing to tally

    const auto outcome = daoeval::tally_outcome(p, lib_votes);
    const Tally t = tally(p, o_votes);
    c.near(tag + " total vp", outcome.total_vp, t.total);
    c.equal(tag + " voters", outcome.n_voters == t.voters);
    for (std::size_t o = 0; o < p.choices.size(); ++o) {
      c.near(tag + " option vp " + std::to_string(o), outcome.per_option_vp[o],
             t.per_option[o]);
    }
    if (!t.tie) {
      c.equal(tag + " winner", outcome.final_option == t.winner,
              std::to_string(outcome.final_option) + " vs " + std::to_string(t.winner));
      c.equal(tag + " tie flag", !outcome.tie);
    }
    const std::size_t winner = t.tie ? outcome.final_option : t.winner;

    const auto sp_want = spike(ev, winner);
    const auto sw_want = stairwise(ev, winner);
    const auto dyn = daoeval::compute_dynamics(series, winner);
    c.equal(tag + " spike presence", dyn.spike.has_value() == sp_want.has_value());
    if (dyn.spike && sp_want) {
      c.near(tag + " spike_index", dyn.spike->spike_index, sp_want->index);
      c.near(tag + " follow_support", dyn.spike->follow_support_ratio, sp_want->follow);
      c.equal(tag + " spike flags", dyn.spike->overflow == sp_want->overflow &&
                                        dyn.spike->empty_tail == sp_want->empty_tail);
    }
    c.equal(tag + " stairwise presence", dyn.stairwise.has_value() == sw_want.has_value());
    if (dyn.stairwise && sw_want) c.near(tag + " stairwise", *dyn.stairwise, *sw_want);

    // ---- market window ----
    const std::string proto = protocol_of(p.space_id);
    const Window mw = market(p, find_series(d, proto, MarketMetric::kPrice),
                             find_series(d, "cmc100", MarketMetric::kIndex),
                             find_series(d, proto, MarketMetric::kTvl),
                             find_series(d, proto, MarketMetric::kTreasury), 3);
    const auto lw = daoeval::compute_market_window(
        p, daoeval::series_bundle_for(index, p, daoeval::ContextOptions{}), 3);
    auto cmp_opt = [&](const std::string& what, const std::optional<double>& got,
                       const std::optional<long double>& want) {
      c.equal(tag + " " + what + " presence", got.has_value() == want.has_value());
      if (got && want) c.near(tag + " " + what, *got, *want);
    };
    cmp_opt("price_pct_change", lw.price_pct_change, mw.price);
    cmp_opt("adj_return", lw.adj_return, mw.adj);
    cmp_opt("tvl_abnormal", lw.tvl_abnormal, mw.tvl);
    cmp_opt("treasury_abnormal", lw.treasury_abnormal, mw.treasury);

    // ---- decisions ----
    const std::size_t n = p.choices.size();
    const std::size_t pick = (ids.size() % 2 == 0) ? outcome.final_option
                                                   : static_cast<std::size_t>(rng() % n);
    const std::size_t ante = static_cast<std::size_t>(rng() % n);
    ids.push_back(p.id);
    ai_pick[p.id] = pick;
    ante_pick[p.id] = ante;
    lib_winner[p.id] = outcome.final_option;

    daoeval::PolicyDecision dec;
    dec.proposal_id = p.id;
    dec.selected_option = pick;
    dec.policy_id = "probe";
    lib_rows.push_back(daoeval::proposal_alignment(p, outcome, lib_votes, dec));
    dec.selected_option = ante;
    lib_ante.push_back(daoeval::proposal_alignment(p, outcome, lib_votes, dec));
    tallied.push_back(daoeval::TalliedProposal{&p, outcome, lib_votes});
    lib_windows.push_back(lw);
    o_price.push_back(mw.price);
    o_tvl.push_back(mw.tvl);
  }
  if (ids.empty()) return c;

  // ---- per-proposal alignment ----
  const OracleEval oe = oracle_eval(d, ids, ai_pick, lib_winner);
  const OracleEval oa = oracle_eval(d, ids, ante_pick, lib_winner);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& got = lib_rows[i];
    const auto& want = oe.rows[i];
    const std::string tag = "alignment " + ids[i];
    c.near(tag + " S", got.S, want.S);
    c.near(tag + " A", got.A, want.A);
    c.near(tag + " H", got.H, want.H);
    c.equal(tag + " agree", got.ai_equals_final == want.agree);
    c.equal(tag + " kind", (got.kind == daoeval::ProposalKind::kBinary) == want.binary);
    if (got.ai_equals_final) c.equal(tag + " A==S exactly", got.A == got.S);
    c.near(tag + " ante H", lib_ante[i].H, oa.rows[i].H);
    c.near(tag + " ante A", lib_ante[i].A, oa.rows[i].A);
  }

  // ---- per-voter benchmarks ----
  std::vector<Proposal> props;
  for (auto* p : oe.proposals) props.push_back(*p);
  const auto want_voters = voters(props, oe.votes, oe.winners);
  const auto got_voters = daoeval::voter_benchmarks(tallied, min_participation);
  c.equal("voter count", got_voters.size() == want_voters.size());
  std::vector<long double> tilde_pool, hat_pool;
  for (const auto& [who, w] : want_voters) {
    if (w.n >= min_participation) {
      if (w.tilde_A) tilde_pool.push_back(*w.tilde_A);
      hat_pool.push_back(w.hat_A);
    }
  }
  for (const auto& g : got_voters) {
    auto it = want_voters.find(g.voter);
    if (it == want_voters.end()) {
      c.equal("voter " + g.voter + " known", false);
      continue;
    }
    const auto& w = it->second;
    c.equal("voter " + g.voter + " n", g.n_proposals == w.n);
    c.equal("voter " + g.voter + " eligible", g.eligible == (w.n >= min_participation));
    c.equal("voter " + g.voter + " tilde presence", g.tilde_A.has_value() == w.tilde_A.has_value());
    if (g.tilde_A && w.tilde_A) c.near("voter " + g.voter + " tilde_A", *g.tilde_A, *w.tilde_A);
    c.near("voter " + g.voter + " hat_A", g.hat_A, w.hat_A);
  }

  // ---- aggregates (Eqs. 3, 5, 8 and the Table 2 layout) ----
  const auto summary = daoeval::aggregate_alignment(lib_rows, got_voters);
  std::vector<long double> As, Hs, Ss, Ns;
  std::size_t agree = 0;
  for (const auto& r : oe.rows) {
    As.push_back(r.A);
    Hs.push_back(r.H);
    Ss.push_back(r.S);
    Ns.push_back(static_cast<long double>(r.voters));
    agree += r.agree;
  }
  compare_stats(c, "A", summary.A, As);
  compare_stats(c, "H", summary.H, Hs);
  compare_stats(c, "S", summary.S, Ss);
  compare_stats(c, "N_voters", summary.n_voters, Ns);
  c.near("P(AI=final)", summary.p_ai_final,
         static_cast<long double>(agree) / static_cast<long double>(oe.rows.size()));
  if (!hat_pool.empty()) {
    const long double med_hat = quantile(hat_pool, 0.5L);
    c.equal("median hat present", summary.median_hat_A.has_value());
    if (summary.median_hat_A) c.near("median hat_A", *summary.median_hat_A, med_hat);
    long double mean_hat = 0;
    for (auto h : hat_pool) mean_hat += h;
    mean_hat /= static_cast<long double>(hat_pool.size());
    if (summary.mean_hat_A) c.near("mean hat_A", *summary.mean_hat_A, mean_hat);
    const bool eq8 = stats(Hs).mean > med_hat;
    if (std::fabs(stats(Hs).mean - med_hat) > 1e-12L) {
      c.equal("Eq. 8 comparison", summary.ai_exceeds_headcount_benchmark == eq8);
    }
  }
  if (!tilde_pool.empty()) {
    const long double med_tilde = quantile(tilde_pool, 0.5L);
    if (summary.median_tilde_A) c.near("median tilde_A", *summary.median_tilde_A, med_tilde);
    const bool eq5 = stats(As).mean > med_tilde;
    if (std::fabs(stats(As).mean - med_tilde) > 1e-12L) {
      c.equal("Eq. 5 comparison", summary.ai_exceeds_token_benchmark == eq5);
    }
  }

  // ---- bucket table ----
  const auto got_buckets = daoeval::bucket_agreement(lib_rows);
  const auto want_buckets = buckets(oe.rows);
  for (std::size_t b = 0; b < 5; ++b) {
    const std::string tag = "bucket " + std::to_string(b);
    c.equal(tag + " n", got_buckets[b].n == want_buckets[b].n);
    c.equal(tag + " presence", got_buckets[b].human.has_value() == want_buckets[b].human.has_value());
    if (got_buckets[b].human && want_buckets[b].human) {
      c.near(tag + " human", *got_buckets[b].human, *want_buckets[b].human);
      c.near(tag + " ai", *got_buckets[b].ai, *want_buckets[b].ai);
      c.near(tag + " diff", *got_buckets[b].difference_pp,
             (*want_buckets[b].ai - *want_buckets[b].human) * 100);
    }
  }

  // ---- ex-post validity ----
  const auto table = daoeval::expost_validity(lib_rows, lib_windows);
  const auto want_cells = expost(oe.rows, o_price, o_tvl);
  for (std::size_t r = 0; r < 6; ++r) {
    const auto& row = r < 5 ? table.rows[r] : table.overall;
    const daoeval::ConditionalCell* cells[4] = {&row.price_ai, &row.price_final, &row.tvl_ai,
                                                &row.tvl_final};
    for (int k = 0; k < 4; ++k) {
      const auto& w = want_cells[r][k];
      const std::string tag = "expost row " + std::to_string(r) + " cell " + std::to_string(k);
      c.equal(tag + " n", cells[k]->n == w.n);
      c.equal(tag + " positive", cells[k]->positive == w.positive);
      c.equal(tag + " probability presence", cells[k]->probability.has_value() == (w.n > 0));
      if (cells[k]->probability && w.n > 0) {
        c.near(tag + " p", *cells[k]->probability,
               static_cast<long double>(w.positive) / static_cast<long double>(w.n));
      }
    }
  }

  // ---- contested subset ----
  const auto cont = daoeval::contested_subset(lib_rows, threshold);
  const auto want_cont = contested(oe.rows, threshold);
  std::vector<Row> cb, cm;
  for (const auto& r : want_cont) (r.binary ? cb : cm).push_back(r);
  compare_subset(c, "contested", cont.all, subset(want_cont));
  compare_subset(c, "contested binary", cont.binary, subset(cb));
  compare_subset(c, "contested multi", cont.multi, subset(cm));
  std::vector<std::string> want_ids;
  for (const auto& r : want_cont) want_ids.push_back(r.id);
  c.equal("contested membership", cont.proposal_ids == want_ids);

  // ---- ex-ante / ex-post comparison ----
  const auto temporal = daoeval::temporal_comparison(lib_ante, lib_rows);
  compare_subset(c, "temporal ex-ante", temporal.ex_ante, subset(oa.rows));
  compare_subset(c, "temporal ex-post", temporal.ex_post, subset(oe.rows));
  std::size_t diverging = 0;
  for (const auto& id : ids) diverging += ante_pick.at(id) != ai_pick.at(id);
  c.equal("temporal diverging", temporal.n_diverging == diverging);
  c.near("temporal divergence", temporal.divergence,
         static_cast<long double>(diverging) / static_cast<long double>(ids.size()));
  return c;
}

namespace {

long double num(const daoeval::Json& j) { return j.get<double>(); }

void compare_subset_json(Comparison& c, const std::string& what, const daoeval::Json& got,
                         const Subset& want) {
  c.equal(what + ".n", got.at("n").get<std::size_t>() == want.n);
  if (want.n == 0) return;
  c.near(what + ".p_ai_final", num(got.at("p_ai_final")), want.p);
  c.near(what + ".mean_A", num(got.at("mean_A")), want.A);
  c.near(what + ".mean_H", num(got.at("mean_H")), want.H);
  c.near(what + ".mean_S", num(got.at("mean_S")), want.S);
}

void compare_stats_json(Comparison& c, const std::string& what, const daoeval::Json& got,
                        const std::vector<long double>& values) {
  const Stats w = stats(values);
  c.equal(what + ".n", got.at("n").get<std::size_t>() == values.size());
  c.near(what + ".mean", num(got.at("mean")), w.mean);
  c.near(what + ".median", num(got.at("median")), w.median);
  c.near(what + ".std", num(got.at("std")), w.std);
  c.near(what + ".q25", num(got.at("q25")), w.q25);
  c.near(what + ".q75", num(got.at("q75")), w.q75);
  c.near(what + ".max", num(got.at("max")), w.max);
}

}  // namespace

Comparison compare_report(const daoeval::Json& report, const Dataset& d) {
  Comparison c;
  const auto& params = report.at("parameters");
  const long double threshold = num(params.at("contested_threshold"));
  const auto min_part = params.at("min_participation").get<std::size_t>();
  const int w = params.at("window_days").get<int>();
  c.equal("price measure", params.at("price_measure") == "price_pct_change");

  // Evaluation set: proposals with at least one ballot, in dataset order.
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> post_pick, ante_pick, winners;
  for (const auto& p : d.proposals) {
    const auto vs = votes_of(d, p.id);
    if (vs.empty()) continue;
    const Tally t = tally(p, vs);
    ids.push_back(p.id);
    winners[p.id] = t.winner;
    post_pick[p.id] = t.winner;  // token majority with every ballot visible
    ante_pick[p.id] = 0;         // nothing visible at the start: lowest index
  }
  const OracleEval oe = oracle_eval(d, ids, post_pick, winners);
  const OracleEval oa = oracle_eval(d, ids, ante_pick, winners);

  const auto& rows = report.at("proposals");
  c.equal("proposal count", rows.size() == ids.size());
  for (std::size_t i = 0; i < std::min(rows.size(), ids.size()); ++i) {
    const auto& g = rows[i];
    const auto& r = oe.rows[i];
    const std::string tag = "proposal " + r.id;
    c.equal(tag + " id", g.at("proposal_id") == r.id);
    c.equal(tag + " tie", !r.tie && !g.at("tie").get<bool>());
    c.equal(tag + " final", g.at("final_option").get<std::size_t>() == oe.winners[i] + 1);
    c.near(tag + " S", num(g.at("S")), r.S);
    c.near(tag + " A", num(g.at("A")), r.A);
    c.near(tag + " H", num(g.at("H")), r.H);
    c.equal(tag + " n_voters", g.at("n_voters").get<std::size_t>() == r.voters);
  }

  std::vector<long double> As, Hs, Ss, Ns;
  for (const auto& r : oe.rows) {
    As.push_back(r.A);
    Hs.push_back(r.H);
    Ss.push_back(r.S);
    Ns.push_back(static_cast<long double>(r.voters));
  }
  const auto& summary = report.at("summary");
  compare_stats_json(c, "A", summary.at("stats").at("A"), As);
  compare_stats_json(c, "H", summary.at("stats").at("H"), Hs);
  compare_stats_json(c, "S", summary.at("stats").at("S"), Ss);
  compare_stats_json(c, "N_voters", summary.at("stats").at("N_voters"), Ns);
  c.near("p_ai_final", num(summary.at("p_ai_final")), 1.0L);

  std::vector<Proposal> props;
  for (auto* p : oe.proposals) props.push_back(*p);
  const auto vb = voters(props, oe.votes, oe.winners);
  std::vector<long double> tilde_pool, hat_pool;
  for (const auto& [who, v] : vb) {
    if (v.n < min_part) continue;
    if (v.tilde_A) tilde_pool.push_back(*v.tilde_A);
    hat_pool.push_back(v.hat_A);
  }
  const auto& sv = summary.at("voters");
  c.equal("voters total", sv.at("total").get<std::size_t>() == vb.size());
  c.equal("voters eligible", sv.at("eligible").get<std::size_t>() == hat_pool.size());
  if (!tilde_pool.empty()) {
    c.near("median tilde_A", num(sv.at("median_tilde_A")), quantile(tilde_pool, 0.5L));
    c.equal("Eq. 5", summary.at("comparisons").at("token").get<bool>() ==
                         (stats(As).mean > quantile(tilde_pool, 0.5L)));
  }
  if (!hat_pool.empty()) {
    c.near("median hat_A", num(sv.at("median_hat_A")), quantile(hat_pool, 0.5L));
    c.equal("Eq. 8", summary.at("comparisons").at("headcount").get<bool>() ==
                         (stats(Hs).mean > quantile(hat_pool, 0.5L)));
  }
  for (const auto& gv : report.at("voters")) {
    const auto it = vb.find(gv.at("voter").get<std::string>());
    if (it == vb.end()) {
      c.equal("voter listed", false);
      continue;
    }
    c.equal("voter n", gv.at("n_proposals").get<std::size_t>() == it->second.n);
    c.near("voter hat_A", num(gv.at("hat_A")), it->second.hat_A);
    if (it->second.tilde_A) c.near("voter tilde_A", num(gv.at("tilde_A")), *it->second.tilde_A);
  }

  const auto want_b = buckets(oe.rows);
  const auto& gb = report.at("buckets");
  for (std::size_t b = 0; b < 5; ++b) {
    c.equal("bucket n", gb[b].at("n").get<std::size_t>() == want_b[b].n);
    if (want_b[b].human) {
      c.near("bucket human", num(gb[b].at("human")), *want_b[b].human);
      c.near("bucket ai", num(gb[b].at("ai")), *want_b[b].ai);
    }
  }

  std::vector<std::optional<long double>> price, tvl;
  for (auto* p : oe.proposals) {
    const std::string proto = protocol_of(p->space_id);
    const Window mw = market(*p, find_series(d, proto, MarketMetric::kPrice),
                             find_series(d, "cmc100", MarketMetric::kIndex),
                             find_series(d, proto, MarketMetric::kTvl),
                             find_series(d, proto, MarketMetric::kTreasury), w);
    price.push_back(mw.price);
    tvl.push_back(mw.tvl);
  }
  const auto cells = expost(oe.rows, price, tvl);
  const char* names[4] = {"price_ai", "price_final", "tvl_ai", "tvl_final"};
  for (std::size_t r = 0; r < 6; ++r) {
    const auto& row = r < 5 ? report.at("expost").at("rows")[r] : report.at("expost").at("overall");
    for (int k = 0; k < 4; ++k) {
      const auto& g = row.at(names[k]);
      c.equal("expost n", g.at("n").get<std::size_t>() == cells[r][k].n);
      c.equal("expost positive", g.at("positive").get<std::size_t>() == cells[r][k].positive);
    }
  }

  const auto cont = contested(oe.rows, threshold);
  std::vector<Row> cb, cm;
  for (const auto& r : cont) (r.binary ? cb : cm).push_back(r);
  compare_subset_json(c, "contested", report.at("contested").at("all"), subset(cont));
  compare_subset_json(c, "contested binary", report.at("contested").at("binary"), subset(cb));
  compare_subset_json(c, "contested multi", report.at("contested").at("multi"), subset(cm));

  if (!report.at("temporal").is_null()) {
    const auto& t = report.at("temporal");
    compare_subset_json(c, "temporal ex-ante", t.at("ex_ante"), subset(oa.rows));
    compare_subset_json(c, "temporal ex-post", t.at("ex_post"), subset(oe.rows));
    std::size_t div = 0;
    for (const auto& id : ids) div += winners.at(id) != 0;
    c.equal("temporal diverging", t.at("n_diverging").get<std::size_t>() == div);
  }
  return c;
}

}  // namespace oracle

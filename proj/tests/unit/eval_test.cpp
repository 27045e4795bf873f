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

#include <doctest.h>

#include <numeric>

#include "daoeval/error.hpp"
#include "daoeval/eval.hpp"
#include "test_support.hpp"

using namespace daoeval;
using testing::make_proposal;
using testing::make_vote;

namespace {

PolicyDecision pick(const std::string& id, std::size_t option) {
  PolicyDecision d;
  d.proposal_id = id;
  d.selected_option = option;
  d.policy_id = "test";
  return d;
}

ProposalAlignment row(const std::string& id, double S, double A, double H, bool agree,
                      ProposalKind kind, std::optional<bool> change, std::size_t voters = 4,
                      double final_mass = 2) {
  ProposalAlignment r;
  r.proposal_id = id;
  r.S = S;
  r.A = A;
  r.H = H;
  r.ai_equals_final = agree;
  r.kind = kind;
  r.calls_for_change = change;
  r.n_voters = voters;
  r.headcount_final_mass = final_mass;
  return r;
}

}  // namespace

TEST_CASE("proposal alignment") {
  const auto p = make_proposal("p", {"A", "B", "C"});
  const std::vector<VoteRecord> votes{make_vote("p", "x", 1, 5, p.start),
                                      make_vote("p", "y", 1, 3, p.start),
                                      make_vote("p", "z", 2, 2, p.start)};
  const auto outcome = tally_outcome(p, votes);

  const auto match = proposal_alignment(p, outcome, votes, pick("p", 0));
  CHECK(match.S == doctest::Approx(0.8));
  CHECK(match.A == match.S);
  CHECK(match.H == doctest::Approx(2.0 / 3.0));
  CHECK(match.ai_equals_final);
  CHECK(match.kind == ProposalKind::kMulti);

  const auto nobody = proposal_alignment(p, outcome, votes, pick("p", 2));
  CHECK(nobody.A == 0.0);
  CHECK(nobody.H == 0.0);
  CHECK_FALSE(nobody.ai_equals_final);

  CHECK_THROWS_AS(proposal_alignment(p, outcome, votes, pick("other", 0)), Error);
  CHECK_THROWS_AS(proposal_alignment(p, outcome, votes, pick("p", 3)), Error);
}

TEST_CASE("unanimous proposal scores one everywhere") {
  const auto p = make_proposal("p", {"Yes", "No"});
  const std::vector<VoteRecord> votes{make_vote("p", "x", 2, 1, p.start),
                                      make_vote("p", "y", 2, 9, p.end)};
  const auto a = proposal_alignment(p, tally_outcome(p, votes), votes, pick("p", 1));
  CHECK(a.S == 1.0);
  CHECK(a.A == 1.0);
  CHECK(a.H == 1.0);
}

TEST_CASE("split ballots count fractionally in the headcount") {
  const auto p = make_proposal("p", {"A", "B"});
  const std::vector<VoteRecord> votes{VoteRecord{"p", "x", ApprovalChoice{{1, 2}}, 2, p.start},
                                      make_vote("p", "y", 1, 1, p.start)};
  const auto a = proposal_alignment(p, tally_outcome(p, votes), votes, pick("p", 0));
  CHECK(a.S == doctest::Approx(2.0 / 3.0));
  CHECK(a.H == doctest::Approx(0.75));
  CHECK(a.headcount_final_mass == doctest::Approx(1.5));
}

TEST_CASE("zero total power is a degenerate tally") {
  const auto p = make_proposal("p", {"A", "B"});
  const std::vector<VoteRecord> votes{make_vote("p", "x", 1, 0, p.start)};
  try {
    proposal_alignment(p, tally_outcome(p, votes), votes, pick("p", 0));
    FAIL("expected DegenerateTally");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateTally);
  }
}

TEST_CASE("voter benchmarks") {
  const auto p1 = make_proposal("p1", {"A", "B"});
  const auto p2 = make_proposal("p2", {"A", "B"});
  const std::vector<VoteRecord> v1{make_vote("p1", "x", 1, 9, p1.start),
                                   make_vote("p1", "big", 1, 100, p1.start)};
  const std::vector<VoteRecord> v2{make_vote("p2", "x", 2, 1, p2.start),
                                   make_vote("p2", "big", 1, 100, p2.start)};
  const std::vector<TalliedProposal> tallied{{&p1, tally_outcome(p1, v1), v1},
                                             {&p2, tally_outcome(p2, v2), v2}};
  const auto all = voter_benchmarks(tallied, 2);
  REQUIRE(all.size() == 2);
  CHECK(all[0].voter == "big");
  CHECK(*all[0].tilde_A == 1.0);
  CHECK(all[0].hat_A == 1.0);
  CHECK(all[1].voter == "x");
  CHECK(*all[1].tilde_A == doctest::Approx(0.9));
  CHECK(all[1].hat_A == doctest::Approx(0.5));
  CHECK(all[1].eligible);
  CHECK_FALSE(voter_benchmarks(tallied, 3)[1].eligible);
}

TEST_CASE("zero-weight voter has no token benchmark") {
  const auto p = make_proposal("p", {"A", "B"});
  const std::vector<VoteRecord> v{make_vote("p", "ghost", 1, 0, p.start),
                                  make_vote("p", "real", 1, 2, p.start)};
  const std::vector<TalliedProposal> tallied{{&p, tally_outcome(p, v), v}};
  const auto all = voter_benchmarks(tallied, 1);
  CHECK_FALSE(all[0].tilde_A.has_value());
  CHECK(all[0].hat_A == 1.0);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize(v);
  CHECK(s.mean == 5.0);
  CHECK(s.median == 4.5);
  CHECK(s.std == doctest::Approx(2.138089935299395));
  CHECK(s.q25 == 4.0);
  CHECK(s.q75 == 5.5);
  CHECK(s.max == 9.0);
  const auto one = summarize(std::vector<double>{0.3});
  CHECK(one.std == 0.0);
  CHECK(one.mean == 0.3);
  CHECK_THROWS_AS(summarize(std::vector<double>{}), Error);

  std::vector<double> many(100001, 0.1);
  CHECK(stable_sum(many) == doctest::Approx(10000.1).epsilon(1e-12));
}

TEST_CASE("aggregate alignment and the benchmark comparisons") {
  const std::vector<ProposalAlignment> rows{
      row("a", 0.9, 0.75, 0.6, true, ProposalKind::kBinary, true),
      row("b", 0.7, 0.25, 0.2, false, ProposalKind::kBinary, false)};
  std::vector<VoterBenchmark> voters{{"x", 5, 0.25, 0.4, true}, {"y", 5, 0.75, 0.5, true},
                                     {"z", 1, 0.0, 0.0, false}};
  const auto s = aggregate_alignment(rows, voters);
  CHECK(s.n_proposals == 2);
  CHECK(s.p_ai_final == 0.5);
  CHECK(s.A.mean == 0.5);
  CHECK(*s.median_tilde_A == 0.5);
  CHECK(*s.median_hat_A == doctest::Approx(0.45));
  CHECK(s.n_voters_total == 3);
  CHECK(s.n_voters_eligible == 2);
  // 0.5 > 0.5 is false: the comparison is strict.
  CHECK(*s.ai_exceeds_token_benchmark == false);
  CHECK(*s.ai_exceeds_headcount_benchmark == false);

  const auto single = aggregate_alignment(std::vector<ProposalAlignment>{rows[0]}, {});
  CHECK(single.A.mean == 0.75);
  CHECK_FALSE(single.median_tilde_A.has_value());
  CHECK_FALSE(single.ai_exceeds_token_benchmark.has_value());
  CHECK_THROWS_AS(aggregate_alignment(std::vector<ProposalAlignment>{}, voters), Error);
}

TEST_CASE("bucket agreement") {
  const std::vector<ProposalAlignment> rows{
      row("a", 0.9, 0.9, 0.6, true, ProposalKind::kBinary, true, 4, 3),
      row("b", 0.9, 0.9, 0.6, true, ProposalKind::kBinary, true, 6, 3),
      row("c", 0.7, 0.3, 0.2, false, ProposalKind::kMulti, false),
      row("d", 0.7, 0.7, 0.2, true, ProposalKind::kMulti, std::nullopt)};
  const auto b = bucket_agreement(rows);
  REQUIRE(b.size() == 5);
  CHECK(b[0].bucket == Bucket::kBinaryChange);
  CHECK(b[0].n == 2);
  CHECK(*b[0].human == doctest::Approx(0.6));
  CHECK(*b[0].ai == 1.0);
  CHECK(*b[0].difference_pp == doctest::Approx(40.0));
  CHECK(b[1].n == 0);
  CHECK_FALSE(b[1].human.has_value());
  CHECK(b[3].n == 1);
  CHECK(*b[3].ai == 0.0);
  CHECK(b[4].n == 1);
  std::size_t total = 0;
  for (const auto& r : b) total += r.n;
  CHECK(total == rows.size());
  CHECK(to_string(Bucket::kMultiNoChange) == "multi_change_no");
}

TEST_CASE("ex-post validity table") {
  const std::vector<ProposalAlignment> rows{
      row("a", 0.9, 0.9, 0.6, true, ProposalKind::kBinary, true),
      row("b", 0.9, 0.9, 0.6, false, ProposalKind::kBinary, true),
      row("c", 0.9, 0.9, 0.6, true, ProposalKind::kMulti, false)};
  std::vector<MarketWindow> w(3);
  w[0].proposal_id = "a";
  w[0].price_pct_change = 2.0;
  w[0].adj_return = -1.0;
  w[0].tvl_abnormal = 0.0;  // zero is not positive
  w[1].proposal_id = "b";
  w[1].price_pct_change = -3.0;
  w[2].proposal_id = "c";
  const auto t = expost_validity(rows, w);
  CHECK(t.rows[0].price_final.n == 2);
  CHECK(t.rows[0].price_final.positive == 1);
  CHECK(*t.rows[0].price_final.probability == 0.5);
  CHECK(t.rows[0].price_ai.n == 1);
  CHECK(*t.rows[0].price_ai.probability == 1.0);
  CHECK(t.rows[0].tvl_ai.n == 1);
  CHECK(*t.rows[0].tvl_ai.probability == 0.0);
  CHECK(t.rows[3].price_final.n == 0);
  CHECK_FALSE(t.rows[3].price_final.probability.has_value());
  CHECK(t.overall.price_final.n == 2);

  const auto adj = expost_validity(rows, w, PriceMeasure::kAdjReturn);
  CHECK(adj.rows[0].price_final.n == 1);
  CHECK(adj.rows[0].price_final.positive == 0);
  CHECK(parse_price_measure("adj_return") == PriceMeasure::kAdjReturn);
}

TEST_CASE("contested subset") {
  const std::vector<ProposalAlignment> rows{
      row("a", 0.95, 0.95, 0.9, true, ProposalKind::kBinary, true),
      row("b", 0.60, 0.60, 0.5, true, ProposalKind::kBinary, true),
      row("c", 0.40, 0.10, 0.2, false, ProposalKind::kMulti, false)};
  const auto c = contested_subset(rows);
  CHECK(c.proposal_ids == std::vector<std::string>{"b", "c"});
  CHECK(c.all.n == 2);
  CHECK(*c.all.p_ai_final == 0.5);
  CHECK(*c.all.mean_S == doctest::Approx(0.5));
  CHECK(c.binary.n == 1);
  CHECK(c.multi.n == 1);
  CHECK(*c.multi.mean_A == doctest::Approx(0.1));

  const auto everything = contested_subset(rows, 1.0);
  const auto global = subset_stats(rows);
  CHECK(everything.all == global);
  const auto none = contested_subset(rows, 0.1);
  CHECK(none.all.n == 0);
  CHECK_FALSE(none.all.mean_A.has_value());
}

TEST_CASE("temporal comparison") {
  std::vector<ProposalAlignment> post{row("a", 0.9, 0.9, 0.6, true, ProposalKind::kBinary, true),
                                      row("b", 0.8, 0.8, 0.5, true, ProposalKind::kBinary, true)};
  post[0].ai_option = 1;
  post[1].ai_option = 0;
  auto ante = post;
  ante[1].ai_option = 1;
  ante[1].ai_equals_final = false;
  ante[1].A = 0.2;
  const auto t = temporal_comparison(ante, post);
  CHECK(t.n == 2);
  CHECK(t.n_diverging == 1);
  CHECK(t.divergence == 0.5);
  CHECK(t.diverging_ids == std::vector<std::string>{"b"});
  CHECK(*t.ex_ante.p_ai_final == 0.5);
  CHECK(*t.ex_ante.mean_S == *t.ex_post.mean_S);

  ante.pop_back();
  try {
    temporal_comparison(ante, post);
    FAIL("expected CoverageError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCoverageError);
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
}

TEST_CASE("without_ties") {
  std::vector<ProposalAlignment> rows{row("a", 0.5, 0.5, 0.5, true, ProposalKind::kBinary, true),
                                      row("b", 0.5, 0.5, 0.5, true, ProposalKind::kBinary, true)};
  rows[0].tie = true;
  const auto kept = without_ties(rows);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].proposal_id == "b");
}

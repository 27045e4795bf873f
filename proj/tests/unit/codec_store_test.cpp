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

#include <algorithm>

#include <fstream>

#include "daoeval/codec.hpp"
#include "daoeval/error.hpp"
#include "daoeval/store.hpp"
#include "daoeval/synth.hpp"
#include "test_support.hpp"

using namespace daoeval;

TEST_CASE("ballot expressions round-trip through JSON") {
  const std::vector<ChoiceExpr> cases{SingleChoice{2}, ApprovalChoice{{1, 3}},
                                      WeightedChoice{{{1, 0.25}, {2, 0.75}}}};
  for (const auto& c : cases) CHECK(choice_from_json(choice_to_json(c)) == c);
  CHECK(std::get<SingleChoice>(choice_from_json(Json(3))).option == 3);
  CHECK(std::get<ApprovalChoice>(choice_from_json(Json::parse("[1,2]"))).options.size() == 2);
  CHECK(std::get<WeightedChoice>(choice_from_json(Json::parse(R"({"1": 2, "3": 1})")))
            .weights.at(3) == 1.0);
}

TEST_CASE("records round-trip") {
  auto p = testing::make_proposal("0xabc", {"For", "Against"});
  p.calls_for_change = true;
  p.category = "treasury";
  CHECK(proposal_from_json(to_json(p)) == p);
  const VoteRecord v{"0xabc", "0xvoter", WeightedChoice{{{1, 3.0}}}, 12.5, p.start + 5};
  CHECK(vote_from_json(to_json(v)) == v);
  ForumSignal f;
  f.proposal_id = "0xabc";
  f.url = "u";
  f.comments = {{p.start, Polarity::kNegative}};
  f.counts = count_polarities(f.comments);
  f.sentiment = -1;
  f.stance_score = -1;
  CHECK(forum_from_json(to_json(f)) == f);
}

TEST_CASE("timestamps accept numbers and ISO strings") {
  CHECK(timestamp_from_json(Json(1704067200)) == 1704067200);
  CHECK(timestamp_from_json(Json("2024-01-01T00:00:00Z")) == 1704067200);
  CHECK_THROWS_AS(timestamp_from_json(Json(true)), Error);
}

TEST_CASE("malformed records are rejected") {
  CHECK_THROWS_AS(vote_from_json(Json::parse(R"({"proposal": "p"})")), Error);
  CHECK_THROWS_AS(forum_from_json(Json::parse(
                      R"({"proposal":"p","url":"u","stance":0,"sentiment":0,
                          "counts":{"positive":-1,"negative":0,"neutral":0}})")),
                  Error);
}

TEST_CASE("store save/load is lossless and idempotent") {
  ScenarioSpec spec;
  spec.seed = 3;
  spec.spaces = {"one.eth", "two"};
  spec.ballot_mix = {0.4, 0.3, 0.3};
  const auto d = generate_dataset(spec).dataset;
  testing::ScratchDir dir("store");
  DatasetStore store(dir.path());
  const std::vector<SourceRecord> sources{{"snapshot", "http://127.0.0.1/graphql", "2024-01-01T00:00:00Z"}};
  store.save(d, sources);
  const auto first = read_file(dir / "manifest.json");
  const auto loaded = store.load();
  // The store writes records in canonical order, so compare as sets by id.
  auto by_id = [](std::vector<Proposal> v) {
    std::sort(v.begin(), v.end(), [](const Proposal& x, const Proposal& y) { return x.id < y.id; });
    return v;
  };
  CHECK(by_id(loaded.proposals) == by_id(d.proposals));
  CHECK(loaded.forum.size() == d.forum.size());
  CHECK(loaded.market.size() == d.market.size());
  CHECK(loaded.votes.size() == d.votes.size());
  store.save(loaded, sources);
  CHECK(read_file(dir / "manifest.json") == first);
  const auto m = store.manifest();
  REQUIRE(m.has_value());
  CHECK(m->sources == sources);
  std::size_t records = 0;
  for (const auto& f : m->files) records += f.records;
  CHECK(records == d.proposals.size() + d.votes.size() + d.forum.size() + [&] {
          std::size_t n = 0;
          for (const auto& s : d.market) n += s.samples.size();
          return n;
        }());
}

TEST_CASE("tampered files fail the checksum") {
  ScenarioSpec spec;
  spec.n_proposals = 2;
  const auto d = generate_dataset(spec).dataset;
  testing::ScratchDir dir("tamper");
  DatasetStore store(dir.path());
  store.save(d);
  const auto votes = dir.path() / "spaces" / "synth.eth" / "votes.jsonl";
  REQUIRE(std::filesystem::exists(votes));
  std::ofstream(votes, std::ios::app) << "\n";
  try {
    store.load();
    FAIL("expected LoadError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLoadError);
  }
}

TEST_CASE("missing store") {
  testing::ScratchDir dir("empty");
  CHECK_FALSE(DatasetStore(dir / "nothing").manifest().has_value());
  CHECK_THROWS_AS(DatasetStore(dir / "nothing").load(), Error);
}

TEST_CASE("atomic writes replace content") {
  testing::ScratchDir dir("atomic");
  write_file_atomic(dir / "x.txt", "one");
  write_file_atomic(dir / "x.txt", "two");
  CHECK(read_file(dir / "x.txt") == "two");
  CHECK(content_checksum("abc") == content_checksum("abc"));
  CHECK(content_checksum("abc") != content_checksum("abd"));
}

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

#include <deque>
#include <json.hpp>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"
#include "daoeval/llm.hpp"
#include "test_support.hpp"

using namespace daoeval;
using testing::make_proposal;
using testing::make_vote;

namespace {

// Transport that must never be reached: the scripted client answers locally.
class NoNetwork final : public HttpTransport {
 public:
  HttpResponse send(const HttpRequest&) override {
    FAIL("unexpected network request");
    return {};
  }
};

class ScriptedClient final : public LlmClient {
 public:
  explicit ScriptedClient(std::deque<std::string> replies)
      : LlmClient(http_, LlmEndpoint{}), replies_(std::move(replies)) {}

  std::string complete(std::span<const ChatMessage> messages) override {
    seen.emplace_back(messages.begin(), messages.end());
    REQUIRE_FALSE(replies_.empty());
    auto r = replies_.front();
    replies_.pop_front();
    return r;
  }

  std::vector<std::vector<ChatMessage>> seen;

 private:
  HttpClient http_{"llm", std::make_shared<NoNetwork>()};
  std::deque<std::string> replies_;
};

DecisionContext context() {
  DecisionContext ctx;
  ctx.proposal = make_proposal("p", {"For", "Against"});
  ctx.proposal.title = "Raise the stability fee";
  ctx.cutoff = Cutoff{CutoffKind::kExPost, ctx.proposal.end};
  ctx.votes_visible = {make_vote("p", "a", 2, 5, ctx.proposal.start + 10)};
  ctx.tally_visible = tally_outcome(ctx.proposal, ctx.votes_visible);
  return ctx;
}

const std::vector<std::string> kChoices{"For", "Against", "Abstain"};

}  // namespace

TEST_CASE("option matching: exact, case-insensitive, unique prefix") {
  CHECK(match_option("Against", kChoices) == 1);
  CHECK(match_option("  against ", kChoices) == 1);
  CHECK(match_option("Ab", kChoices) == 2);
  CHECK_FALSE(match_option("A", kChoices).has_value());  // Against or Abstain
  CHECK_FALSE(match_option("Maybe", kChoices).has_value());
  CHECK_FALSE(match_option("", kChoices).has_value());
}

TEST_CASE("reply parsing") {
  const auto json = parse_reply(R"(Sure. {"selected_option": "Against", "ai_final_reason": "Too risky."})",
                                kChoices);
  CHECK(json.option == 1);
  CHECK(json.justification == "Too risky.");

  const auto bare = parse_reply("For\nBecause it helps growth.", kChoices);
  CHECK(bare.option == 0);

  const auto keyed = parse_reply("Selected option: **Abstain**", kChoices);
  CHECK(keyed.option == 2);

  CHECK_FALSE(parse_reply("I cannot decide.", kChoices).option.has_value());
  CHECK_FALSE(parse_reply(R"({"selected_option": "Maybe"})", kChoices).option.has_value());
}

TEST_CASE("prompts carry the instruction lines and the proposal") {
  const auto prompts = render_prompts(context());
  CHECK(prompts.system.find("- Choose exactly one option from the available choices. \n") !=
        std::string::npos);
  CHECK(prompts.user.find("Choose exactly one option from the proposal's choices") !=
        std::string::npos);
  CHECK(prompts.user.find("Raise the stability fee") != std::string::npos);
  CHECK(prompts.user.find("- choices: 1. For | 2. Against") != std::string::npos);
  CHECK(prompts.user.find("- current leader: Against") != std::string::npos);
  for (const char* section : {"## Vote Progress", "## Voting Pattern", "## Similar Past Proposals",
                              "## Forum Sentiment", "## Response Format"}) {
    CHECK(prompts.user.find(section) != std::string::npos);
  }
  CHECK(reask_message(context().proposal).find("For | Against") != std::string::npos);
}

TEST_CASE("label reply selects the option and is audited") {
  ScriptedClient client({"Against"});
  AuditLog audit;
  const auto d = decide_llm(context(), client, &audit, nullptr, "llm-test");
  CHECK(d.selected_option == 1);
  CHECK(d.policy_id == "llm-test");
  const auto records = audit.records();
  REQUIRE(records.size() == 1);
  CHECK(records[0].raw_reply == "Against");
  CHECK(records[0].parsed_option == 1);
  CHECK(records[0].prompt.find("Raise the stability fee") != std::string::npos);
  const auto line = nlohmann::json::parse(AuditLog::to_jsonl(records[0]));
  CHECK(line["parsed_option"] == 2);  // 1-based on disk
}

TEST_CASE("one structured re-ask, then failure") {
  Diagnostics diag;
  SUBCASE("recovers on the re-ask") {
    ScriptedClient client({"hmm", "For"});
    const auto d = decide_llm(context(), client, nullptr, &diag);
    CHECK(d.selected_option == 0);
    CHECK(diag.Count(warn::kLlmReask) == 1);
    REQUIRE(client.seen.size() == 2);
    CHECK(client.seen[1].size() == 4);
    CHECK(client.seen[1].back().content == reask_message(context().proposal));
  }
  SUBCASE("gibberish twice is a policy failure") {
    ScriptedClient client({"hmm", "no idea"});
    AuditLog audit;
    try {
      decide_llm(context(), client, &audit, &diag);
      FAIL("expected PolicyFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kPolicyFailure);
    }
    CHECK(audit.records().size() == 2);
  }
}

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

#include "daoeval/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "daoeval/codec.hpp"
#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"

namespace daoeval {
namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string signed_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_decoration(std::string_view s) {
  std::string t = trim(s);
  auto strip_chars = [](std::string& x, std::string_view chars) {
    while (!x.empty() && chars.find(x.front()) != std::string_view::npos) x.erase(x.begin());
    while (!x.empty() && chars.find(x.back()) != std::string_view::npos) x.pop_back();
  };
  strip_chars(t, "\"'`*_ .:;!");
  return trim(t);
}

std::string per_option(const Proposal& p, const std::vector<double>& values, int digits) {
  std::string out;
  for (std::size_t o = 0; o < values.size(); ++o) {
    if (o) out += "; ";
    out += p.choices[o] + "=" + fixed(values[o], digits);
  }
  return out;
}

}  // namespace

const std::string& main_message_template() {
  static const std::string text =
      "## Main Message: Governance vote recommendation for a Snapshot proposal (ex-post blind).\n"
      "- Choose exactly one option from the available choices. \n"
      "- If your choice diverges from the leading tally, assume your guidance prioritizes the "
      "organization's durable benefit.\n"
      "- Use available MCP tools to gather forum discussions and run sentiment analysis to "
      "report total comments.\n"
      "- Find similar historical proposals, summarize their impact, and treat declines as "
      "unsuccessful lessons to inform the future.\n"
      "- Clarify whether vote does or does not reflect community views, and whether the "
      "recommendation mirrors aggregated input.\n"
      "- Synthesize vote counts, analytics, and sentiment to explain.\n";
  return text;
}

const std::string& decision_template() {
  static const std::string text =
      "## Objective: Choose exactly one option from the proposal's choices that will maximize "
      "the organization's long-term growth\n"
      "* Impact Reminder: (Proposal, Voting MCPs)\n"
      "- Assume your recommendation could change the final tally.\n"
      "- Use vote progress only as a data point, but make an independent choice that maximizes "
      "the organization's long-term growth.\n"
      "* Voting Pattern: (Timeline MCPs)\n"
      "- Evaluate whether the temporal voting pattern indicates stable consensus formation or "
      "late-stage volatility in the decision process.\n"
      "* Historical Lessons: (Snapshot Proposal MCPs), (Coinmarketcap, Defillama MCPs)\n"
      "- Retrieve similar past proposals.\n"
      "- Note whether post-vote token price or TVL declined.\n"
      "- Treat declines as unsuccessful outcomes and extract lessons.\n"
      "* Sentiment Alignment: (Sentiment Analysis MCPs)\n"
      "- Inspect forum discussion comments posted before proposal end only.\n"
      "- Judge whether aggregated forum sentiment supports or opposes the likely vote outcome.\n"
      "- Count of positive, negative, neutral sentiments of Comments\n"
      "* Integration:\n"
      "- Weave lessons from similar proposals and forum sentiment counts into ai_final_reason, "
      "alongside market and timeline analytics.\n";
  return text;
}

RenderedPrompt render_prompts(const DecisionContext& ctx) {
  const Proposal& p = ctx.proposal;
  RenderedPrompt out;
  out.system = main_message_template();

  std::string u = decision_template();
  u += "\n## Proposal\n";
  u += "- id: " + p.id + "\n";
  u += "- space: " + p.space_id + "\n";
  u += "- title: " + p.title + "\n";
  u += "- choices:";
  for (std::size_t o = 0; o < p.choices.size(); ++o) {
    u += (o ? " | " : " ") + std::to_string(o + 1) + ". " + p.choices[o];
  }
  u += "\n";
  u += "- voting window: " + format_iso8601(p.start) + " to " + format_iso8601(p.end) + "\n";
  u += "- decision point: " + std::string(to_string(ctx.cutoff.kind)) + " (" +
       format_iso8601(ctx.cutoff.at) + ")\n";
  u += "- category: " + p.category.value_or("unlabeled") + "\n";
  u += "### Body\n" + (p.body && !p.body->empty() ? *p.body : std::string("(none)")) + "\n";

  u += "\n## Vote Progress\n";
  if (ctx.tally_visible) {
    const auto& t = *ctx.tally_visible;
    u += "- visible ballots: " + std::to_string(ctx.votes_visible.size()) +
         " (unique voters: " + std::to_string(t.n_voters) + ")\n";
    u += "- voting power by option:";
    for (std::size_t o = 0; o < t.per_option_vp.size(); ++o) {
      const double share = t.total_vp > 0 ? t.per_option_vp[o] / t.total_vp * 100.0 : 0.0;
      u += (o ? "; " : " ") + p.choices[o] + "=" + general(t.per_option_vp[o]) + " (" +
           fixed(share, 1) + "%)";
    }
    u += "\n- current leader: " + p.choices[t.final_option] + (t.tie ? " (tied)" : "") + "\n";
  } else {
    u += "- no ballots visible at the decision point\n";
  }

  u += "\n## Voting Pattern\n";
  if (ctx.dynamics_visible) {
    const auto& d = *ctx.dynamics_visible;
    u += "- lead ratio (overall): " + per_option(p, d.lead.total, 4) + "\n";
    u += "- lead ratio (first quartile): " + per_option(p, d.lead.early, 4) + "\n";
    if (d.spike) {
      u += "- spike index: " + fixed(d.spike->spike_index) + " (support after spike: " +
           (d.spike->empty_tail ? std::string("n/a") : fixed(d.spike->follow_support_ratio)) +
           ")\n";
    }
    if (d.stairwise) u += "- stairwise ratio: " + fixed(*d.stairwise) + "\n";
    u += "- half-slope difference: " + general(d.half_slope_diff) + " VP per ballot\n";
  } else {
    u += "- no voting activity visible\n";
  }

  u += "\n## Similar Past Proposals\n";
  if (ctx.similar_proposals.empty()) {
    u += "- none found\n";
  }
  for (std::size_t i = 0; i < ctx.similar_proposals.size(); ++i) {
    const auto& s = ctx.similar_proposals[i];
    u += std::to_string(i + 1) + ". \"" + s.proposal.title + "\" (" + s.proposal.id +
         ", ended " + format_iso8601(s.proposal.end) + ", similarity " + fixed(s.similarity) +
         ")";
    if (s.outcome) {
      const auto& o = *s.outcome;
      const double share =
          o.total_vp > 0 ? o.per_option_vp[o.final_option] / o.total_vp * 100.0 : 0.0;
      u += "; outcome: " + s.proposal.choices[o.final_option] + " with " + fixed(share, 1) +
           "% of voting power";
    } else {
      u += "; outcome: no ballots";
    }
    if (s.market) {
      const auto& m = *s.market;
      u += "; price change: " +
           (m.price_pct_change ? signed_fixed(*m.price_pct_change, 2) + "%" : std::string("n/a"));
      u += "; TVL change: " +
           (m.tvl_abnormal ? signed_fixed(*m.tvl_abnormal * 100.0, 2) + "%" : std::string("n/a"));
      const bool declined = (m.price_pct_change && *m.price_pct_change < 0) ||
                            (m.tvl_abnormal && *m.tvl_abnormal < 0);
      if (declined) u += " (decline)";
    } else {
      u += "; market response: n/a";
    }
    u += "\n";
  }

  u += "\n## Forum Sentiment\n";
  if (ctx.forum_visible) {
    const auto& f = *ctx.forum_visible;
    u += "- thread: " + (f.url.empty() ? std::string("(unknown)") : f.url) + "\n";
    u += "- comments before the decision point: positive " + std::to_string(f.counts.positive) +
         ", negative " + std::to_string(f.counts.negative) + ", neutral " +
         std::to_string(f.counts.neutral) + "\n";
    u += "- stance score: " + signed_fixed(f.stance_score, 4) + "; sentiment: " +
         signed_fixed(f.sentiment, 4) + "\n";
  } else {
    u += "- no forum discussion visible\n";
  }

  u += "\n## Response Format\n";
  u += "Reply with a JSON object: {\"selected_option\": \"<one label from the choices, "
       "verbatim>\", \"ai_final_reason\": \"<justification>\"}\n";
  out.user = std::move(u);
  return out;
}

std::string reask_message(const Proposal& proposal) {
  std::string msg = "Your reply did not name one of the choices. Reply with one choice label "
                    "verbatim, one of: ";
  for (std::size_t o = 0; o < proposal.choices.size(); ++o) {
    if (o) msg += " | ";
    msg += proposal.choices[o];
  }
  return msg;
}

LlmClient::LlmClient(HttpClient& http, LlmEndpoint endpoint)
    : http_(http), endpoint_(std::move(endpoint)) {}

std::string LlmClient::complete(std::span<const ChatMessage> messages) {
  Json body;
  body["model"] = endpoint_.model;
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back(Json{{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  body["temperature"] = endpoint_.temperature;
  Headers headers{{"Content-Type", "application/json"}};
  if (!endpoint_.api_key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + endpoint_.api_key);
  }
  HttpResponse res = http_.post(endpoint_.url, body.dump(), headers);
  if (res.status != 200) {
    throw Error(ErrorCode::kSourceUnavailable,
                "llm endpoint returned HTTP " + std::to_string(res.status));
  }
  try {
    const Json j = Json::parse(res.body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSourceProtocolError,
                std::string("llm endpoint reply has no completion text: ") + e.what());
  }
}

std::optional<std::size_t> match_option(std::string_view candidate,
                                        std::span<const std::string> choices) {
  const std::string c = trim(candidate);
  if (c.empty()) return std::nullopt;
  for (std::size_t o = 0; o < choices.size(); ++o) {
    if (choices[o] == c) return o;
  }
  const std::string lc = lower(c);
  for (std::size_t o = 0; o < choices.size(); ++o) {
    if (lower(trim(choices[o])) == lc) return o;
  }
  std::optional<std::size_t> found;
  for (std::size_t o = 0; o < choices.size(); ++o) {
    if (lower(trim(choices[o])).starts_with(lc)) {
      if (found) return std::nullopt;
      found = o;
    }
  }
  return found;
}

ParsedReply parse_reply(std::string_view raw, std::span<const std::string> choices) {
  ParsedReply out;
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    try {
      const Json j = Json::parse(raw.substr(open, close - open + 1));
      if (j.is_object() && j.contains("selected_option")) {
        const Json& sel = j["selected_option"];
        if (sel.is_string()) out.option = match_option(sel.get<std::string>(), choices);
        for (const char* key : {"justification", "ai_final_reason"}) {
          if (j.contains(key) && j[key].is_string() && !trim(j[key].get<std::string>()).empty()) {
            out.justification = trim(j[key].get<std::string>());
            break;
          }
        }
      }
    } catch (const std::exception&) {
    }
  }
  if (!out.option) {
    std::size_t pos = 0;
    while (pos <= raw.size() && !out.option) {
      auto nl = raw.find('\n', pos);
      if (nl == std::string_view::npos) nl = raw.size();
      std::string line = trim(raw.substr(pos, nl - pos));
      pos = nl + 1;
      if (line.empty()) continue;
      const std::string ll = lower(line);
      for (const char* key : {"selected_option", "selected option", "choice", "vote"}) {
        if (ll.starts_with(key)) {
          const auto colon = line.find(':');
          if (colon != std::string::npos) line = line.substr(colon + 1);
          break;
        }
      }
      out.option = match_option(strip_decoration(line), choices);
      if (!out.option) break;  // only the first meaningful line may be a bare label
    }
  }
  if (out.option && out.justification.empty()) {
    out.justification = trim(raw);
    if (out.justification.empty()) out.justification = choices[*out.option];
  }
  return out;
}

AuditLog::AuditLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

std::string AuditLog::to_jsonl(const AuditRecord& r) {
  Json j;
  j["proposal_id"] = r.proposal_id;
  j["policy_id"] = r.policy_id;
  j["prompt"] = r.prompt;
  j["raw_reply"] = r.raw_reply;
  j["parsed_option"] = r.parsed_option ? Json(*r.parsed_option + 1) : Json(nullptr);
  j["timestamp"] = r.timestamp;
  return j.dump() + "\n";
}

void AuditLog::append(const AuditRecord& r) {
  std::lock_guard<std::mutex> lock(mu_);
  if (path_.empty()) {
    records_.push_back(r);
    return;
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path_.string());
  out << to_jsonl(r);
}

std::vector<AuditRecord> AuditLog::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

PolicyDecision decide_llm(const DecisionContext& ctx, LlmClient& client, AuditLog* audit,
                          Diagnostics* diag, std::string policy_id) {
  const Proposal& p = ctx.proposal;
  const RenderedPrompt prompt = render_prompts(ctx);
  std::vector<ChatMessage> messages{{"system", prompt.system}, {"user", prompt.user}};
  auto now = [] {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };

  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string raw = client.complete(messages);
    const ParsedReply parsed = parse_reply(raw, p.choices);
    if (audit) {
      audit->append(AuditRecord{p.id, policy_id,
                                messages.front().content + "\n\n" + messages.back().content,
                                raw, parsed.option, now()});
    }
    if (parsed.option) {
      PolicyDecision d;
      d.proposal_id = p.id;
      d.selected_option = *parsed.option;
      d.justification = parsed.justification;
      d.policy_id = policy_id;
      d.cutoff = ctx.cutoff;
      return d;
    }
    if (attempt == 0) {
      if (diag) diag->Warn(warn::kLlmReask, p.id);
      messages.push_back({"assistant", raw});
      messages.push_back({"user", reask_message(p)});
    }
  }
  throw Error(ErrorCode::kPolicyFailure,
              "no choice label could be parsed from the LLM reply for '" + p.id + "'");
}

}  // namespace daoeval

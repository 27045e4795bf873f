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

// LLM-backed policy: prompt rendering, a minimal chat-completion client,
// reply parsing and the append-only audit log.

#ifndef DAOEVAL_LLM_HPP_
#define DAOEVAL_LLM_HPP_

#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/http.hpp"
#include "daoeval/policy.hpp"

namespace daoeval {

class Diagnostics;

const std::string& main_message_template();
const std::string& decision_template();

struct RenderedPrompt {
  std::string system;  // main message template
  std::string user;    // decision template followed by the context sections
};

/// Byte-identical output for identical contexts.
RenderedPrompt render_prompts(const DecisionContext& context);

/// The structured re-ask sent after an unparsable reply.
std::string reask_message(const Proposal& proposal);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct LlmEndpoint {
  std::string url;  // full chat-completions URL
  std::string model;
  std::string api_key;
  double temperature = 0.0;
};

class LlmClient {
 public:
  LlmClient(HttpClient& http, LlmEndpoint endpoint);
  virtual ~LlmClient() = default;
  /// Returns the text of the first completion choice.
  virtual std::string complete(std::span<const ChatMessage> messages);

 private:
  HttpClient& http_;
  LlmEndpoint endpoint_;
};

/// Exact label, then case-insensitive, then unique case-insensitive prefix.
std::optional<std::size_t> match_option(std::string_view candidate,
                                        std::span<const std::string> choices);

struct ParsedReply {
  std::optional<std::size_t> option;
  std::string justification;
};

/// Accepts a JSON object with "selected_option" (and "justification" or
/// "ai_final_reason") anywhere in the reply, a "selected_option: X" line, or a
/// bare label.
ParsedReply parse_reply(std::string_view raw, std::span<const std::string> choices);

struct AuditRecord {
  std::string proposal_id;
  std::string policy_id;
  std::string prompt;
  std::string raw_reply;
  std::optional<std::size_t> parsed_option;  // 0-based
  std::int64_t timestamp = 0;
};

/// JSON-lines audit trail; appends are serialized across threads.
/// Appends one JSON line per exchange to `path`, or keeps the records in
/// memory when constructed without a path.
class AuditLog {
 public:
  AuditLog() = default;
  explicit AuditLog(std::filesystem::path path);
  void append(const AuditRecord& record);
  const std::filesystem::path& path() const { return path_; }
  std::vector<AuditRecord> records() const;

  static std::string to_jsonl(const AuditRecord& record);

 private:
  mutable std::mutex mu_;
  std::filesystem::path path_;
  std::vector<AuditRecord> records_;
};

/// One request, one structured re-ask on an unparsable reply, then
/// kPolicyFailure. Every request/response pair is written to `audit`.
PolicyDecision decide_llm(const DecisionContext& context, LlmClient& client,
                          AuditLog* audit = nullptr, Diagnostics* diag = nullptr,
                          std::string policy_id = "llm");

}  // namespace daoeval

#endif  // DAOEVAL_LLM_HPP_

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

// In-process stand-in for every upstream service, serving a Dataset in the
// wire formats the source clients expect:
//
//   POST /graphql                                  Snapshot hub (proposals, proposal, votes)
//   GET  /protocol/<slug>, /treasury/<slug>        DeFiLlama TVL / treasury
//   GET  /v2/cryptocurrency/quotes/historical      CoinMarketCap daily quotes
//   GET  /v3/index/cmc100-historical               CoinMarketCap index
//   GET  /forum/<proposal id>                      forum signal
//   POST /v1/chat/completions                      scripted chat model
//
// Binds 127.0.0.1 on an ephemeral port; nothing leaves the host.

#ifndef DAOEVAL_TOOLS_MOCK_SERVER_HPP_
#define DAOEVAL_TOOLS_MOCK_SERVER_HPP_

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "daoeval/dataset.hpp"

namespace httplib {
class Server;
}

namespace daoeval::mock {

enum class LlmMode {
  kFirst,          // always the first choice label
  kFixed,          // always `fixed_label`
  kLeader,         // the visible leader in the prompt, else the first choice
  kGibberish,      // never a parsable label
  kGibberishOnce,  // unparsable first reply, a label after the re-ask
};

LlmMode parse_llm_mode(const std::string& text);

struct MockOptions {
  LlmMode llm_mode = LlmMode::kLeader;
  std::string fixed_label;
  /// The first N requests (any route) are answered with HTTP 503.
  int fail_first_requests = 0;
  /// Routes (path prefixes) that always answer with the given status.
  std::map<std::string, int> forced_status;
};

class MockServer {
 public:
  explicit MockServer(Dataset dataset, MockOptions options = {});
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds and starts serving; returns the port.
  int start(int port = 0);
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  int port() const { return port_; }
  std::string base_url() const;
  std::string snapshot_url() const { return base_url() + "/graphql"; }
  std::string llm_url() const { return base_url() + "/v1/chat/completions"; }

  /// Requests received, by route name ("graphql", "defillama", "cmc",
  /// "forum", "llm", "other").
  std::map<std::string, std::size_t> request_counts() const;
  std::size_t total_requests() const;

 private:
  void install_routes();

  Dataset dataset_;
  MockOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_left_{0};
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> counts_;
};

}  // namespace daoeval::mock

#endif  // DAOEVAL_TOOLS_MOCK_SERVER_HPP_

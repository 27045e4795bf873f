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

// Serves a stored dataset through the mock upstream endpoints until killed.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "daoeval/error.hpp"
#include "daoeval/store.hpp"
#include "mock_server.hpp"

namespace {
daoeval::mock::MockServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock Snapshot / DeFiLlama / CoinMarketCap / forum / chat endpoints"};
  std::string dataset;
  int port = 0;
  std::string llm_mode = "leader";
  std::string fixed_label;
  app.add_option("--dataset", dataset, "Dataset store to serve")->required();
  app.add_option("--port", port, "Port on 127.0.0.1 (0 = ephemeral)");
  app.add_option("--llm-mode", llm_mode, "first, fixed, leader, gibberish or gibberish_once");
  app.add_option("--fixed-label", fixed_label, "Label returned in fixed mode");
  CLI11_PARSE(app, argc, argv);

  try {
    daoeval::mock::MockOptions opts;
    opts.llm_mode = daoeval::mock::parse_llm_mode(llm_mode);
    opts.fixed_label = fixed_label;
    daoeval::mock::MockServer server(daoeval::DatasetStore(dataset).load(), opts);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.start(port);
    std::printf("%s\n", server.base_url().c_str());
    std::fflush(stdout);
    server.wait();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "daoeval-mock: %s\n", e.what());
    return 2;
  }
  return 0;
}

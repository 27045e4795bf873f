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

// Drives the daoeval executable: exit codes, the bundled scenario and the
// checked-in golden report.

#include <doctest.h>

#include <string>

#include "daoeval/store.hpp"
#include "equivalence.hpp"
#include "mock_server.hpp"
#include "test_support.hpp"

using namespace daoeval;

namespace {

const std::filesystem::path kSource = DAOEVAL_SOURCE_ROOT;

std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

int cli(const std::string& args, const testing::ScratchDir& dir) {
  return testing::run_command(std::string(DAOEVAL_CLI_PATH) + " --quiet " + args + " > " +
                              quote(dir / "stdout.txt") + " 2> " + quote(dir / "stderr.txt"));
}

std::string bundled_args(const testing::ScratchDir& dir, int workers) {
  return "--config " + quote(kSource / "scenarios" / "bundled.config.json") + " --dataset " +
         quote(dir / "dataset") + " --output " + quote(dir / "out") + " --workers " +
         std::to_string(workers);
}

}  // namespace

TEST_CASE("unknown config keys exit with 2") {
  testing::ScratchDir dir("cli-config");
  testing::write_text(dir / "bad.json", R"({"dataset": "d", "output": "o", "colour": 1})");
  CHECK(cli("features --config " + quote(dir / "bad.json"), dir) == 2);
  CHECK(testing::read_text(dir / "stderr.txt").find("colour") != std::string::npos);
  CHECK(cli("features --cutoff sideways", dir) == 2);
  testing::write_text(dir / "broken.json", "{");
  CHECK(cli("features --config " + quote(dir / "broken.json"), dir) == 2);
}

TEST_CASE("unreachable upstream exits with 3") {
  testing::ScratchDir dir("cli-source");
  int closed_port = 0;
  {
    // Bind and release a port so nothing is listening on it.
    mock::MockServer probe(Dataset{});
    closed_port = probe.start();
  }
  const std::string url = "http://127.0.0.1:" + std::to_string(closed_port) + "/graphql";
  CHECK(cli("ingest --dataset " + quote(dir / "dataset") + " --output " + quote(dir / "out") +
                " --spaces aave.eth --max-attempts 1 --snapshot-url " + url,
            dir) == 3);
}

TEST_CASE("evaluate without decisions exits with 4") {
  testing::ScratchDir dir("cli-coverage");
  REQUIRE(cli("synth " + bundled_args(dir, 1), dir) == 0);
  CHECK(cli("evaluate " + bundled_args(dir, 1), dir) == 4);
}

TEST_CASE("bundled scenario reproduces the golden report") {
  testing::ScratchDir one("cli-golden1"), many("cli-golden8");
  for (const char* command : {"synth", "features", "simulate", "evaluate", "report"}) {
    INFO(command);
    REQUIRE(cli(std::string(command) + " " + bundled_args(one, 1), one) == 0);
    REQUIRE(cli(std::string(command) + " " + bundled_args(many, 8), many) == 0);
  }
  const std::string golden =
      testing::read_text(kSource / "tests" / "fixtures" / "golden" / "bundled_report.json");
  REQUIRE_FALSE(golden.empty());
  CHECK(testing::read_text(one / "out" / "report.json") == golden);
  CHECK(testing::read_text(many / "out" / "report.json") == golden);

  // Every number in the golden file is recomputed independently.
  const auto cmp = oracle::compare_report(Json::parse(golden), DatasetStore(one / "dataset").load());
  for (const auto& m : cmp.mismatches) MESSAGE(m);
  CHECK(cmp.ok());
}

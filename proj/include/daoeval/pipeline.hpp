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

// Batch commands: ingest -> features -> simulate -> evaluate -> report, plus
// synth for generated datasets.
//
// Artifacts under the output directory:
//   features/dynamics.csv, features/market_windows.jsonl
//   decisions/<policy_id>.<cutoff>.jsonl
//   audit/<policy_id>.<cutoff>.jsonl          (LLM policies only)
//   report.json, report.md, tables/*.csv     (paths configurable)
//   synth_truth.json                          (synth only)
// Every file is written atomically; per-proposal work runs on a worker pool
// and results are assembled in dataset order, so outputs do not depend on
// the number of workers.

#ifndef DAOEVAL_PIPELINE_HPP_
#define DAOEVAL_PIPELINE_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/config.hpp"
#include "daoeval/policy.hpp"
#include "daoeval/report.hpp"

namespace daoeval {

class Diagnostics;

/// Runs fn(0..n-1) on up to `workers` threads. If any call throws, the
/// exception of the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// One line of a decisions file. `status` is "ok", "inapplicable" or
/// "failed"; only "ok" lines carry a selection.
struct DecisionLine {
  std::string proposal_id;
  std::string status = "ok";
  std::optional<PolicyDecision> decision;
  std::string detail;
};

Json decision_line_to_json(const DecisionLine& line, const Proposal& proposal);
DecisionLine decision_line_from_json(const Json& j);

std::filesystem::path decisions_path(const RunConfig& config, CutoffKind kind);

class Pipeline {
 public:
  Pipeline(RunConfig config, Diagnostics& diag);

  void run(Command command);

  void ingest();
  void features();
  void simulate();
  void evaluate();
  void report();
  void synth();

  /// Builds the report document without writing it.
  EvaluationReport build_report();

 private:
  RunConfig config_;
  Diagnostics& diag_;
};

}  // namespace daoeval

#endif  // DAOEVAL_PIPELINE_HPP_

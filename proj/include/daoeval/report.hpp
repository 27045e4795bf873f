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

// Evaluation report document.
//
// The JSON form is the machine-readable artifact written by `evaluate`;
// Markdown and CSV renderings are derived from that JSON alone so `report`
// can run without the dataset. Schema "daoeval.report", version 1:
//
//   schema, schema_version, policy_id, cutoff,
//   parameters {contested_threshold, min_participation, window_days,
//               price_measure, exclude_ties},
//   summary {n_proposals, n_ties, p_ai_final, stats{A,H,S,N_voters},
//            voters{total, eligible, median_tilde_A, median_hat_A,
//                   mean_hat_A}, comparisons{token, headcount}},
//   buckets[], expost{price_measure, rows[], overall}, contested{...},
//   temporal{...} | null, excluded[], proposals[], voters[]
//
// Absent values are written as null. Arrays follow dataset order.

#ifndef DAOEVAL_REPORT_HPP_
#define DAOEVAL_REPORT_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/eval.hpp"

namespace daoeval {

inline constexpr const char* kReportSchema = "daoeval.report";
inline constexpr int kReportSchemaVersion = 1;

struct ReportParameters {
  double contested_threshold = 0.60;
  std::size_t min_participation = 5;
  int window_days = 3;
  PriceMeasure price_measure = PriceMeasure::kPctChange;
  bool exclude_ties = false;
};

struct ExcludedProposal {
  std::string proposal_id;
  std::string reason;
};

struct EvaluationReport {
  std::string policy_id;
  std::string cutoff;
  ReportParameters parameters;
  AlignmentSummary summary;
  std::vector<BucketRow> buckets;
  ExpostTable expost;
  ContestedReport contested;
  std::optional<TemporalReport> temporal;
  std::vector<ExcludedProposal> excluded;
  std::vector<ProposalAlignment> proposals;
  std::vector<VoterBenchmark> voters;
};

Json report_to_json(const EvaluationReport& report);

/// Throws kLoadError when `doc` is not a supported report document.
void check_report_schema(const Json& doc);

std::string render_markdown(const Json& doc);

/// File name -> CSV content, one file per table.
std::map<std::string, std::string> render_csv(const Json& doc);

}  // namespace daoeval

#endif  // DAOEVAL_REPORT_HPP_

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

// Side-by-side comparison of library results against the brute-force
// reference on a whole dataset.

#ifndef DAOEVAL_TESTS_EQUIVALENCE_HPP_
#define DAOEVAL_TESTS_EQUIVALENCE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/dataset.hpp"

namespace oracle {

struct Comparison {
  std::size_t checks = 0;
  std::vector<std::string> mismatches;

  bool ok() const { return mismatches.empty(); }
  /// Records a mismatch when |got - want| > rel * max(|got|, |want|) + 1e-12.
  void near(const std::string& what, long double got, long double want, long double rel = 1e-9L);
  void equal(const std::string& what, bool same, const std::string& detail = {});
};

/// Compares every per-proposal, per-voter and aggregate quantity plus the
/// temporal and market features. The policy under test picks the realized
/// winner for even-positioned proposals and a seeded option otherwise, so A
/// and H differ from S often enough to be exercised.
Comparison compare_dataset(const daoeval::Dataset& dataset, std::uint64_t seed,
                           double contested_threshold = 0.60,
                           std::size_t min_participation = 5);

/// Recomputes every number in a report document produced with the
/// token_majority policy (cutoff "both" or "ex-post") from the dataset.
Comparison compare_report(const daoeval::Json& report, const daoeval::Dataset& dataset);

}  // namespace oracle

#endif  // DAOEVAL_TESTS_EQUIVALENCE_HPP_

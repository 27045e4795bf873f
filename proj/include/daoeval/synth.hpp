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

// Seeded synthetic governance datasets for offline testing.
//
// Every random draw goes through daoeval::Rng (std::mt19937_64 seeded with
// the scenario seed, which the standard fixes bit-for-bit, plus explicit
// integer-to-real transforms), and draws happen in a fixed order, so a spec
// and seed produce byte-identical output on every platform.

#ifndef DAOEVAL_SYNTH_HPP_
#define DAOEVAL_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/dataset.hpp"

namespace daoeval {

enum class VpDistribution { kUniform, kPareto };
enum class ArrivalPattern { kUniform, kEarlyRush, kLateSpike, kStairwise };

std::string_view to_string(VpDistribution d);
std::string_view to_string(ArrivalPattern p);
ArrivalPattern parse_arrival_pattern(std::string_view text);

struct BallotMix {
  double single = 1.0;
  double approval = 0.0;
  double weighted = 0.0;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t n_proposals = 20;
  std::size_t min_options = 2;
  std::size_t max_options = 2;
  /// Size of the voter population shared by all proposals.
  std::size_t voters = 40;
  /// Probability that a voter casts a ballot on a given proposal.
  double participation = 0.6;
  VpDistribution vp_distribution = VpDistribution::kUniform;
  double pareto_alpha = 1.5;
  ArrivalPattern arrival = ArrivalPattern::kUniform;
  double contested_fraction = 0.0;
  BallotMix ballot_mix;
  std::vector<std::string> spaces{"synth.eth"};
  Timestamp first_start = 1704067200;  // 2024-01-01T00:00:00Z
  int duration_days = 5;
  int spacing_days = 7;
  /// Share of proposals carrying a calls_for_change label.
  double labeled_fraction = 1.0;
  bool forum = true;
  bool market = true;
  std::string index_protocol = "cmc100";
  /// Probability that any single market day is missing.
  double market_gap_rate = 0.0;
};

/// Throws kSpecError for infeasible or inconsistent specs.
void validate_scenario(const ScenarioSpec& spec);

/// Missing keys keep their defaults; unknown keys are rejected. Accepts
/// "options" as an integer or a [min, max] pair.
ScenarioSpec scenario_from_json(const Json& doc);
Json to_json(const ScenarioSpec& spec);

struct ProposalTruth {
  std::string proposal_id;
  std::size_t intended_winner = 0;  // 0-based
  bool contested = false;
  ArrivalPattern arrival = ArrivalPattern::kUniform;
  std::string spike_voter;  // ballot with the largest voting power
  Timestamp spike_timestamp = 0;
  int spike_quartile = 0;   // 0..3
};

struct SyntheticDataset {
  Dataset dataset;
  std::vector<ProposalTruth> truth;
};

SyntheticDataset generate_dataset(const ScenarioSpec& spec);

/// Ground-truth sidecar; consumed by tests only.
Json sidecar_to_json(const ScenarioSpec& spec, const std::vector<ProposalTruth>& truth);

}  // namespace daoeval

#endif  // DAOEVAL_SYNTH_HPP_

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

#ifndef DAOEVAL_DIAGNOSTICS_HPP_
#define DAOEVAL_DIAGNOSTICS_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

namespace daoeval {

// Warning counter names shared across modules.
namespace warn {
inline constexpr std::string_view kRecordSkipped = "record_skipped";
inline constexpr std::string_view kVoteOutOfWindow = "vote_out_of_window";
inline constexpr std::string_view kDuplicateBallot = "duplicate_ballot_dropped";
inline constexpr std::string_view kDegenerateTally = "degenerate_tally";
inline constexpr std::string_view kDegenerateBaseline = "degenerate_baseline";
inline constexpr std::string_view kDegenerateSeries = "degenerate_series";
inline constexpr std::string_view kEmptyVisibleVotes = "empty_visible_votes";
inline constexpr std::string_view kLlmReask = "llm_reask";
inline constexpr std::string_view kHttpRetry = "http_retry";
inline constexpr std::string_view kZeroWeightVoter = "zero_weight_voter";
}  // namespace warn

// Thread-safe warning counters plus an optional structured event sink.
// Events are emitted as one JSON object per line by the sink.
class Diagnostics {
 public:
  using Sink = std::function<void(const std::string& line)>;

  Diagnostics() = default;
  explicit Diagnostics(Sink sink) : sink_(std::move(sink)) {}

  Diagnostics(const Diagnostics&) = delete;
  Diagnostics& operator=(const Diagnostics&) = delete;

  void Warn(std::string_view counter, std::string_view detail = {});
  void Info(std::string_view event, std::string_view detail = {});

  std::size_t Count(std::string_view counter) const;
  std::map<std::string, std::size_t> Snapshot() const;
  void Reset();

 private:
  void Emit(std::string_view level, std::string_view event,
            std::string_view detail);

  mutable std::mutex mu_;
  std::map<std::string, std::size_t, std::less<>> counters_;
  Sink sink_;
};

}  // namespace daoeval

#endif  // DAOEVAL_DIAGNOSTICS_HPP_

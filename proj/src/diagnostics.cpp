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

#include "daoeval/diagnostics.hpp"

#include <json.hpp>

namespace daoeval {

void Diagnostics::Warn(std::string_view counter, std::string_view detail) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = counters_.find(counter);
    if (it == counters_.end()) {
      counters_.emplace(std::string(counter), 1);
    } else {
      ++it->second;
    }
  }
  Emit("warn", counter, detail);
}

void Diagnostics::Info(std::string_view event, std::string_view detail) {
  Emit("info", event, detail);
}

void Diagnostics::Emit(std::string_view level, std::string_view event,
                       std::string_view detail) {
  if (!sink_) return;
  nlohmann::ordered_json line;
  line["level"] = level;
  line["event"] = event;
  if (!detail.empty()) line["detail"] = detail;
  std::lock_guard<std::mutex> lock(mu_);
  sink_(line.dump());
}

std::size_t Diagnostics::Count(std::string_view counter) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = counters_.find(counter);
  return it == counters_.end() ? 0 : it->second;
}

std::map<std::string, std::size_t> Diagnostics::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {counters_.begin(), counters_.end()};
}

void Diagnostics::Reset() {
  std::lock_guard<std::mutex> lock(mu_);
  counters_.clear();
}

}  // namespace daoeval

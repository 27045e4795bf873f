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

// Small builders and scratch-directory helpers shared by the test suites.

#ifndef DAOEVAL_TESTS_SUPPORT_HPP_
#define DAOEVAL_TESTS_SUPPORT_HPP_

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include "daoeval/model.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("daoeval-" + tag + "-" + std::to_string(stamp) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

inline daoeval::Proposal make_proposal(std::string id, std::vector<std::string> choices,
                                       daoeval::Timestamp start = 1'700'000'000,
                                       daoeval::Timestamp end = 1'700'000'000 + 4 * 86400) {
  daoeval::Proposal p;
  p.id = std::move(id);
  p.space_id = "test.eth";
  p.title = "Proposal " + p.id;
  p.body = "Body of " + p.id;
  p.choices = std::move(choices);
  p.created_at = start - 3600;
  p.start = start;
  p.end = end;
  return p;
}

inline daoeval::VoteRecord make_vote(const std::string& proposal, const std::string& voter,
                                     std::size_t option, double vp, daoeval::Timestamp ts) {
  return daoeval::VoteRecord{proposal, voter, daoeval::SingleChoice{option}, vp, ts};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Runs a shell command and returns its exit status (-1 if it did not exit).
inline int run_command(const std::string& command) {
  const int raw = std::system(command.c_str());
  if (raw == -1 || !WIFEXITED(raw)) return -1;
  return WEXITSTATUS(raw);
}

}  // namespace testing

#endif  // DAOEVAL_TESTS_SUPPORT_HPP_

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

#ifndef DAOEVAL_STORE_HPP_
#define DAOEVAL_STORE_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daoeval/dataset.hpp"

namespace daoeval {

class Diagnostics;

struct SourceRecord {
  std::string name;
  std::string endpoint;
  std::string fetched_at;  // ISO-8601 UTC
  bool operator==(const SourceRecord&) const = default;
};

struct ManifestEntry {
  std::string path;  // relative to the store root, '/' separated
  std::size_t records = 0;
  std::string checksum;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  int version = 1;
  std::vector<ManifestEntry> files;
  std::vector<SourceRecord> sources;
};

/// A dataset on disk:
///
///   <root>/manifest.json
///   <root>/spaces/<space_id>/proposals.jsonl
///   <root>/spaces/<space_id>/votes.jsonl
///   <root>/spaces/<space_id>/forum.jsonl      (when the space has signals)
///   <root>/market.jsonl                        (when any series exist)
///
/// One JSON object per line, UTF-8, fixed field order. Spaces are written in
/// order of first appearance and records keep their relative order within a
/// space, so a dataset whose records are grouped by space reloads equal to
/// what was saved. Single writer; any number of concurrent readers.
class DatasetStore {
 public:
  explicit DatasetStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Replaces the stored dataset. Each file is written to a temporary path and
  /// renamed into place; files from a previous save that are no longer listed
  /// are removed. Source fetch times are carried over unchanged when every
  /// file checksum matches the previous manifest.
  void save(const Dataset& dataset, std::span<const SourceRecord> sources = {});

  /// Loads and validates every record. Throws kLoadError naming the file and
  /// 1-based line for corrupt lines, invariant violations, unlisted files and
  /// checksum mismatches.
  Dataset load() const;

  std::optional<Manifest> manifest() const;

 private:
  std::filesystem::path root_;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);
/// FNV-1a 64-bit, lowercase hex.
std::string content_checksum(std::string_view content);

}  // namespace daoeval

#endif  // DAOEVAL_STORE_HPP_

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

#include "daoeval/store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "daoeval/codec.hpp"
#include "daoeval/error.hpp"

namespace daoeval {
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "manifest.json";

[[noreturn]] void load_error(const std::string& file, std::size_t line,
                             const std::string& why) {
  throw Error(ErrorCode::kLoadError,
              file + ":" + std::to_string(line) + ": " + why);
}

void check_space_id(const std::string& space) {
  if (space.empty() || space == "." || space == ".." ||
      space.find('/') != std::string::npos ||
      space.find('\\') != std::string::npos) {
    throw Error(ErrorCode::kInvalidRecord,
                "space id '" + space + "' cannot name a directory");
  }
}

struct FileBuffer {
  std::string text;
  std::size_t records = 0;

  void append(const Json& j) {
    text += j.dump();
    text += '\n';
    ++records;
  }
};

// Calls `fn(json, line_number)` for every line in `text`.
template <typename Fn>
void for_each_line(const std::string& rel, const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      load_error(rel, line_no, "truncated line (missing newline)");
    }
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      load_error(rel, line_no, std::string("malformed JSON: ") + e.what());
    }
    try {
      fn(j, line_no);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kLoadError) throw;
      load_error(rel, line_no, e.what());
    }
  }
}

Json manifest_to_json(const Manifest& m) {
  Json j;
  j["format"] = "daoeval-dataset";
  j["version"] = m.version;
  Json files = Json::array();
  for (const auto& f : m.files) {
    files.push_back(Json{{"path", f.path}, {"records", f.records}, {"checksum", f.checksum}});
  }
  j["files"] = std::move(files);
  Json sources = Json::array();
  for (const auto& s : m.sources) {
    sources.push_back(
        Json{{"name", s.name}, {"endpoint", s.endpoint}, {"fetched_at", s.fetched_at}});
  }
  j["sources"] = std::move(sources);
  return j;
}

Manifest manifest_from_json(const Json& j) {
  Manifest m;
  m.version = static_cast<int>(require_integer(j, "version"));
  for (const auto& f : require_field(j, "files")) {
    m.files.push_back(ManifestEntry{
        require_string(f, "path"),
        static_cast<std::size_t>(require_integer(f, "records")),
        require_string(f, "checksum")});
  }
  if (j.contains("sources")) {
    for (const auto& s : j.at("sources")) {
      m.sources.push_back(SourceRecord{require_string(s, "name"),
                                       require_string(s, "endpoint"),
                                       require_string(s, "fetched_at")});
    }
  }
  return m;
}

}  // namespace

std::string content_checksum(std::string_view content) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DatasetStore::DatasetStore(fs::path root) : root_(std::move(root)) {}

std::optional<Manifest> DatasetStore::manifest() const {
  const fs::path p = root_ / kManifestName;
  if (!fs::exists(p)) return std::nullopt;
  try {
    return manifest_from_json(Json::parse(read_file(p)));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kLoadError, std::string(kManifestName) + ": " + e.what());
  }
}

void DatasetStore::save(const Dataset& dataset, std::span<const SourceRecord> sources) {
  std::vector<std::string> space_order;
  std::map<std::string, std::string> space_of;  // proposal id -> space
  std::map<std::string, FileBuffer> files;       // relative path -> content
  for (const auto& p : dataset.proposals) {
    check_space_id(p.space_id);
    if (std::find(space_order.begin(), space_order.end(), p.space_id) ==
        space_order.end()) {
      space_order.push_back(p.space_id);
    }
    space_of[p.id] = p.space_id;
    files["spaces/" + p.space_id + "/proposals.jsonl"].append(to_json(p));
  }
  auto space_for = [&](const std::string& proposal_id, const char* what) {
    auto it = space_of.find(proposal_id);
    if (it == space_of.end()) {
      throw Error(ErrorCode::kInvalidRecord, std::string(what) + " references unknown proposal '" +
                                                 proposal_id + "'");
    }
    return it->second;
  };
  for (const auto& space : space_order) {
    files["spaces/" + space + "/votes.jsonl"];  // present even when empty
  }
  for (const auto& v : dataset.votes) {
    files["spaces/" + space_for(v.proposal_id, "vote") + "/votes.jsonl"].append(to_json(v));
  }
  for (const auto& f : dataset.forum) {
    files["spaces/" + space_for(f.proposal_id, "forum signal") + "/forum.jsonl"].append(
        to_json(f));
  }
  for (const auto& s : dataset.market) {
    for (const auto& sample : s.samples) {
      files["market.jsonl"].append(market_sample_to_json(s, sample));
    }
    if (s.samples.empty()) files["market.jsonl"];
  }

  Manifest m;
  for (const auto& space : space_order) {
    for (const char* name : {"proposals.jsonl", "votes.jsonl", "forum.jsonl"}) {
      const std::string rel = "spaces/" + space + "/" + name;
      auto it = files.find(rel);
      if (it == files.end()) continue;
      m.files.push_back({rel, it->second.records, content_checksum(it->second.text)});
    }
  }
  if (auto it = files.find("market.jsonl"); it != files.end()) {
    m.files.push_back({"market.jsonl", it->second.records, content_checksum(it->second.text)});
  }

  const auto previous = manifest();
  m.sources.assign(sources.begin(), sources.end());
  if (previous && previous->files == m.files) {
    for (auto& s : m.sources) {
      for (const auto& old : previous->sources) {
        if (old.name == s.name && old.endpoint == s.endpoint) s.fetched_at = old.fetched_at;
      }
    }
  }

  fs::create_directories(root_);
  for (const auto& entry : m.files) {
    const auto& buf = files.at(entry.path);
    const fs::path target = root_ / entry.path;
    bool unchanged = false;
    if (fs::exists(target)) {
      unchanged = read_file(target) == buf.text;
    }
    if (!unchanged) write_file_atomic(target, buf.text);
  }
  if (previous) {
    std::set<std::string> keep;
    for (const auto& e : m.files) keep.insert(e.path);
    for (const auto& e : previous->files) {
      if (!keep.count(e.path)) fs::remove(root_ / e.path);
    }
  }
  write_file_atomic(root_ / kManifestName, manifest_to_json(m).dump(2) + "\n");
}

Dataset DatasetStore::load() const {
  const auto m = manifest();
  if (!m) {
    throw Error(ErrorCode::kLoadError,
                (root_ / kManifestName).string() + ": manifest not found");
  }
  std::set<std::string> listed;
  for (const auto& e : m->files) listed.insert(e.path);
  if (fs::exists(root_)) {
    for (const auto& entry : fs::recursive_directory_iterator(root_)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
      const std::string rel = fs::relative(entry.path(), root_).generic_string();
      if (!listed.count(rel)) {
        throw Error(ErrorCode::kLoadError, rel + ": file not listed in manifest");
      }
    }
  }

  Dataset ds;
  std::map<std::string, std::size_t> proposal_pos;
  std::set<std::pair<std::string, std::string>> ballots;
  // Proposals first so that votes and signals can be validated against them.
  std::vector<const ManifestEntry*> ordered;
  for (const auto& e : m->files) {
    if (e.path.ends_with("/proposals.jsonl")) ordered.push_back(&e);
  }
  for (const auto& e : m->files) {
    if (!e.path.ends_with("/proposals.jsonl")) ordered.push_back(&e);
  }

  for (const ManifestEntry* e : ordered) {
    const fs::path path = root_ / e->path;
    if (!fs::exists(path)) {
      throw Error(ErrorCode::kLoadError, e->path + ": listed in manifest but missing");
    }
    const std::string text = read_file(path);
    std::size_t count = 0;
    if (e->path.ends_with("/proposals.jsonl")) {
      for_each_line(e->path, text, [&](const Json& j, std::size_t line) {
        Proposal p = proposal_from_json(j);
        validate_proposal(p);
        if (!proposal_pos.emplace(p.id, ds.proposals.size()).second) {
          load_error(e->path, line, "duplicate proposal id '" + p.id + "'");
        }
        ds.proposals.push_back(std::move(p));
        ++count;
      });
    } else if (e->path.ends_with("/votes.jsonl")) {
      for_each_line(e->path, text, [&](const Json& j, std::size_t line) {
        VoteRecord v = vote_from_json(j);
        auto it = proposal_pos.find(v.proposal_id);
        if (it == proposal_pos.end()) {
          load_error(e->path, line, "vote for unknown proposal '" + v.proposal_id + "'");
        }
        validate_vote(v, ds.proposals[it->second]);
        if (!ballots.emplace(v.proposal_id, v.voter).second) {
          load_error(e->path, line, "duplicate ballot by " + v.voter);
        }
        ds.votes.push_back(std::move(v));
        ++count;
      });
    } else if (e->path.ends_with("/forum.jsonl")) {
      for_each_line(e->path, text, [&](const Json& j, std::size_t line) {
        ForumSignal f = forum_from_json(j);
        if (!proposal_pos.count(f.proposal_id)) {
          load_error(e->path, line,
                     "forum signal for unknown proposal '" + f.proposal_id + "'");
        }
        validate_forum_signal(f);
        ds.forum.push_back(std::move(f));
        ++count;
      });
    } else if (e->path == "market.jsonl") {
      for_each_line(e->path, text, [&](const Json& j, std::size_t) {
        const std::string protocol = require_string(j, "protocol");
        const MarketMetric metric = parse_market_metric(require_string(j, "metric"));
        const MarketSample sample{require_integer(j, "day"), require_number(j, "value")};
        if (ds.market.empty() || ds.market.back().protocol != protocol ||
            ds.market.back().metric != metric) {
          ds.market.push_back(MarketSeries{protocol, metric, {}});
        }
        ds.market.back().samples.push_back(sample);
        validate_market_series(ds.market.back());
        ++count;
      });
    } else {
      throw Error(ErrorCode::kLoadError, e->path + ": unrecognized dataset file");
    }
    if (count != e->records) {
      throw Error(ErrorCode::kLoadError,
                  e->path + ": manifest lists " + std::to_string(e->records) +
                      " records, found " + std::to_string(count));
    }
    if (content_checksum(text) != e->checksum) {
      throw Error(ErrorCode::kLoadError, e->path + ": checksum mismatch");
    }
  }
  return ds;
}

}  // namespace daoeval
